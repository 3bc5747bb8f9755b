#include "recon/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace recon::metrics {

double binary_entropy(double e) {
    if (e < 0.0 || e > 1.0) throw std::invalid_argument("binary_entropy: e must be in [0,1]");
    if (e == 0.0 || e == 1.0) return 0.0;
    return -e * std::log2(e) - (1.0 - e) * std::log2(1.0 - e);
}

double efficiency(int m, int n, int p, int s, double e) {
    if (n - p - s <= 0) throw std::invalid_argument("efficiency: n - p - s must be positive");
    if (e <= 0.0 || e >= 0.5) throw std::invalid_argument("efficiency: e must be in (0, 0.5)");
    return (double)(m - p) / ((double)(n - p - s) * binary_entropy(e));
}

double snr_to_ber(double snr_db) {
    if (!std::isfinite(snr_db)) throw std::invalid_argument("snr_to_ber: snr must be finite");
    double snr_lin = std::pow(10.0, snr_db / 10.0);
    // Q(x) = erfc(x / sqrt(2)) / 2
    double e = 0.5 * std::erfc(std::sqrt(snr_lin) / std::sqrt(2.0));
    if (e < 1e-300) e = 1e-300;
    if (e > 0.5 - 1e-15) e = 0.5 - 1e-15;
    return e;
}

double throughput(long long n_success, int n, int p0, double t_seconds) {
    if (t_seconds <= 0.0) throw std::invalid_argument("throughput: t must be positive");
    return (double)n_success * (double)(n - p0) / t_seconds;
}

}  // namespace recon::metrics
