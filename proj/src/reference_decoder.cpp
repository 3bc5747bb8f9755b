#include "recon/reference_decoder.hpp"

#include <cmath>
#include <stdexcept>

namespace recon::refdec {

void RefDecoder::init(const ldpc::ParityCheckMatrix& H_, const std::vector<uint8_t>& y, double e,
                      const std::vector<uint8_t>& punctured, const std::vector<uint8_t>& shortened,
                      double llr_max_) {
    H = &H_;
    n = H->n_cols;
    m = H->n_rows;
    llr_max = llr_max_;
    if ((int)y.size() != n) throw std::invalid_argument("reference decoder: word length mismatch");
    word = y;

    // Initialization
    double L = std::log((1.0 - e) / e);
    log_prior.assign((size_t)n, 0.0);
    is_shortened.assign((size_t)n, 0);
    for (int i = 0; i < n; ++i) {
        bool p = !punctured.empty() && punctured[(size_t)i];
        bool s = !shortened.empty() && shortened[(size_t)i];
        if (s) {
            log_prior[(size_t)i] = word[(size_t)i] ? -llr_max : llr_max;
            is_shortened[(size_t)i] = 1;
        } else if (p) {
            log_prior[(size_t)i] = 0.0;
        } else {
            log_prior[(size_t)i] = word[(size_t)i] ? -L : L;
        }
    }
    v2c.assign((size_t)m, {});
    c2v.assign((size_t)m, {});
    for (int j = 0; j < m; ++j) {
        v2c[(size_t)j].resize(H->row_adj[(size_t)j].size());
        c2v[(size_t)j].assign(H->row_adj[(size_t)j].size(), 0.0);
        for (size_t t = 0; t < H->row_adj[(size_t)j].size(); ++t)
            v2c[(size_t)j][t] = log_prior[(size_t)H->row_adj[(size_t)j][t]];
    }
    var_edges.assign((size_t)n, {});
    for (int j = 0; j < m; ++j)
        for (size_t t = 0; t < H->row_adj[(size_t)j].size(); ++t)
            var_edges[(size_t)H->row_adj[(size_t)j][t]].push_back({j, (int)t});
}

void RefDecoder::iterate(const ldpc::Syndrome& z) {
    double clamp = llr_max;
    auto sat = [clamp](double x) { return x > clamp ? clamp : (x < -clamp ? -clamp : x); };

    // C2V
    std::vector<double> th, pref, suf;
    for (int j = 0; j < m; ++j) {
        size_t d = v2c[(size_t)j].size();
        th.resize(d);
        pref.resize(d + 1);
        suf.resize(d + 1);
        for (size_t t = 0; t < d; ++t) th[t] = std::tanh(v2c[(size_t)j][t] * 0.5);
        pref[0] = 1.0;
        for (size_t t = 0; t < d; ++t) pref[t + 1] = pref[t] * th[t];
        suf[d] = 1.0;
        for (size_t t = d; t-- > 0;) suf[t] = th[t] * suf[t + 1];
        double sgn = z.bits[(size_t)j] ? -1.0 : 1.0;
        for (size_t t = 0; t < d; ++t)
            c2v[(size_t)j][t] = sat(sgn * 2.0 * std::atanh(pref[t] * suf[t + 1]));
    }

    // V2C
    for (int i = 0; i < n; ++i) {
        const auto& edges = var_edges[(size_t)i];
        for (size_t t = 0; t < edges.size(); ++t) {
            double sum = log_prior[(size_t)i];
            for (size_t u = 0; u < edges.size(); ++u)
                if (u != t) sum += c2v[(size_t)edges[u].first][(size_t)edges[u].second];
            v2c[(size_t)edges[t].first][(size_t)edges[t].second] = sat(sum);
        }
    }

    // decisions
    for (int i = 0; i < n; ++i) {
        if (is_shortened[(size_t)i]) continue;
        double I = log_prior[(size_t)i];
        for (const auto& [cj, slot] : var_edges[(size_t)i]) I += c2v[(size_t)cj][(size_t)slot];
        word[(size_t)i] = (I < 0.0) ? 1 : 0;
    }
}

bool RefDecoder::syndrome_matches(const ldpc::Syndrome& z) const {
    return ldpc::syndrome(*H, word) == z;
}

}  // namespace recon::refdec
