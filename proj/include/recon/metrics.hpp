#pragma once

namespace recon::metrics {

// Shannon binary entropy h(e), with h(0) = h(1) = 0 by convention.
double binary_entropy(double e);

// Reconciliation efficiency f = (m - p) / ((n - p - s) * h(e)).
// With p = s = 0 this reduces to (1 - R0) / h(e).
double efficiency(int m, int n, int p, int s, double e);

// Hard-decision BPSK bit error rate for a given SNR in dB:
// e = Q(sqrt(10^(snr_db/10))), clamped to the open interval (0, 0.5).
double snr_to_ber(double snr_db);

// Throughput T = n_success * (n - p0) / t, in reconciled bits per second.
double throughput(long long n_success, int n, int p0, double t_seconds);

}  // namespace recon::metrics
