#include "recon/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace recon::decoder {

static MatrixWork build_work(const ldpc::ParityCheckMatrix& H) {
    MatrixWork w;
    int m = H.n_rows, n = H.n_cols;
    w.chk_ptr.resize((size_t)m + 1, 0);
    for (int j = 0; j < m; ++j) w.chk_ptr[(size_t)j + 1] = w.chk_ptr[(size_t)j] + (int)H.row_adj[(size_t)j].size();
    int edges = w.chk_ptr[(size_t)m];
    w.chk_var.resize((size_t)edges);
    for (int j = 0; j < m; ++j) {
        int base = w.chk_ptr[(size_t)j];
        for (size_t t = 0; t < H.row_adj[(size_t)j].size(); ++t)
            w.chk_var[(size_t)(base + (int)t)] = H.row_adj[(size_t)j][t];
    }
    // per-variable edge lists, ascending check order
    std::vector<std::vector<int>> per_var((size_t)n);
    for (int j = 0; j < m; ++j) {
        int base = w.chk_ptr[(size_t)j];
        for (size_t t = 0; t < H.row_adj[(size_t)j].size(); ++t)
            per_var[(size_t)H.row_adj[(size_t)j][t]].push_back(base + (int)t);
    }
    w.var_ptr.resize((size_t)n + 1, 0);
    for (int i = 0; i < n; ++i) w.var_ptr[(size_t)i + 1] = w.var_ptr[(size_t)i] + (int)per_var[(size_t)i].size();
    w.var_edge.resize((size_t)edges);
    for (int i = 0, pos = 0; i < n; ++i)
        for (int e : per_var[(size_t)i]) w.var_edge[(size_t)pos++] = e;
    w.v2c.assign((size_t)edges, 0.0);
    w.c2v.assign((size_t)edges, 0.0);
    w.mean_check_degree = (double)edges / (double)m;
    return w;
}

DecoderState init(const std::vector<uint8_t>& word, const rateadapt::PuncturePlan& plan,
                  const DecoderConfig& cfg, const ldpc::MatrixSet& set) {
    if (set.count() < 1) throw std::invalid_argument("decoder: empty matrix set");
    int n = set.n();
    if ((int)word.size() != n) throw std::invalid_argument("decoder: word length mismatch");
    if (cfg.e <= 0.0 || cfg.e >= 0.5) throw std::invalid_argument("decoder: e must be in (0, 0.5)");
    if (cfg.max_iters < 1) throw std::invalid_argument("decoder: max_iters must be >= 1");
    if (cfg.llr_max <= 0.0) throw std::invalid_argument("decoder: llr_max must be positive");

    DecoderState st;
    st.cfg = cfg;
    st.word = word;
    st.cls.assign((size_t)n, BitClass::Ordinary);
    for (int v : plan.P) {
        if (v < 0 || v >= n) throw std::invalid_argument("decoder: punctured position out of range");
        st.cls[(size_t)v] = BitClass::Punctured;
    }
    for (int v : plan.S) {
        if (v < 0 || v >= n) throw std::invalid_argument("decoder: shortened position out of range");
        st.cls[(size_t)v] = BitClass::Shortened;
    }
    st.log_prior.resize((size_t)n);
    double L = std::log((1.0 - cfg.e) / cfg.e);
    for (int i = 0; i < n; ++i) {
        switch (st.cls[(size_t)i]) {
            case BitClass::Ordinary:
                st.log_prior[(size_t)i] = st.word[(size_t)i] ? -L : L;
                break;
            case BitClass::Punctured:
                st.log_prior[(size_t)i] = 0.0;
                break;
            case BitClass::Shortened:
                st.log_prior[(size_t)i] = st.word[(size_t)i] ? -cfg.llr_max : cfg.llr_max;
                break;
        }
    }
    for (const auto& H : set.matrices) {
        MatrixWork w = build_work(H);
        for (size_t e = 0; e < w.v2c.size(); ++e) w.v2c[e] = st.log_prior[(size_t)w.chk_var[e]];
        st.work.push_back(std::move(w));
    }
    st.iteration = 0;
    st.last_error_estimate = cfg.e;
    return st;
}

static inline double clamp_llr(double x, double llr_max) {
    if (x > llr_max) return llr_max;
    if (x < -llr_max) return -llr_max;
    return x;
}

static void check_to_var_sweep(MatrixWork& w, const std::vector<uint8_t>& syn, double llr_max,
                               bool par) {
    int m = (int)w.chk_ptr.size() - 1;
#pragma omp parallel for schedule(static) if (par)
    for (int j = 0; j < m; ++j) {
        static thread_local std::vector<double> th, pref, suf;
        int b = w.chk_ptr[(size_t)j];
        int d = w.chk_ptr[(size_t)j + 1] - b;
        th.resize((size_t)d);
        pref.resize((size_t)d + 1);
        suf.resize((size_t)d + 1);
        for (int t = 0; t < d; ++t) th[(size_t)t] = std::tanh(w.v2c[(size_t)(b + t)] * 0.5);
        pref[0] = 1.0;
        for (int t = 0; t < d; ++t) pref[(size_t)t + 1] = pref[(size_t)t] * th[(size_t)t];
        suf[(size_t)d] = 1.0;
        for (int t = d - 1; t >= 0; --t) suf[(size_t)t] = th[(size_t)t] * suf[(size_t)t + 1];
        double sgn = syn[(size_t)j] ? -1.0 : 1.0;
        for (int t = 0; t < d; ++t) {
            double prod = pref[(size_t)t] * suf[(size_t)t + 1];
            w.c2v[(size_t)(b + t)] = clamp_llr(sgn * 2.0 * std::atanh(prod), llr_max);
        }
    }
}

static void var_to_check_sweep(MatrixWork& w, const std::vector<double>& log_prior, double llr_max,
                               bool par) {
    int n = (int)w.var_ptr.size() - 1;
#pragma omp parallel for schedule(static) if (par)
    for (int i = 0; i < n; ++i) {
        int b = w.var_ptr[(size_t)i], e2 = w.var_ptr[(size_t)i + 1];
        for (int t = b; t < e2; ++t) {
            double sum = log_prior[(size_t)i];
            for (int u = b; u < e2; ++u)
                if (u != t) sum += w.c2v[(size_t)w.var_edge[(size_t)u]];
            w.v2c[(size_t)w.var_edge[(size_t)t]] = clamp_llr(sum, llr_max);
        }
    }
}

void iterate(DecoderState& st, const ldpc::MatrixSet& set,
             const std::vector<ldpc::Syndrome>& syndromes) {
    if ((int)syndromes.size() != set.count())
        throw std::invalid_argument("decoder: syndrome count mismatch");
    bool par = st.cfg.parallel;
    for (int k = 0; k < set.count(); ++k) {
        if ((int)syndromes[(size_t)k].bits.size() != set.m())
            throw std::invalid_argument("decoder: syndrome length mismatch");
        check_to_var_sweep(st.work[(size_t)k], syndromes[(size_t)k].bits, st.cfg.llr_max, par);
        var_to_check_sweep(st.work[(size_t)k], st.log_prior, st.cfg.llr_max, par);
    }
    int n = (int)st.word.size();
    int N = set.count();
#pragma omp parallel for schedule(static) if (par)
    for (int i = 0; i < n; ++i) {
        if (st.cls[(size_t)i] == BitClass::Shortened) continue;
        double I = st.log_prior[(size_t)i];
        for (int k = 0; k < N; ++k) {
            const MatrixWork& w = st.work[(size_t)k];
            int b = w.var_ptr[(size_t)i], e2 = w.var_ptr[(size_t)i + 1];
            for (int t = b; t < e2; ++t) I += w.c2v[(size_t)w.var_edge[(size_t)t]];
        }
        st.word[(size_t)i] = (I < 0.0) ? 1 : 0;
    }
    ++st.iteration;
}

std::vector<int> unsatisfied_counts(const DecoderState& st, const ldpc::MatrixSet& set,
                                    const std::vector<ldpc::Syndrome>& syndromes) {
    std::vector<int> counts((size_t)set.count(), 0);
    for (int k = 0; k < set.count(); ++k) {
        ldpc::Syndrome z = ldpc::syndrome(set.matrices[(size_t)k], st.word);
        int c = 0;
        for (size_t j = 0; j < z.bits.size(); ++j)
            if (z.bits[j] != syndromes[(size_t)k].bits[j]) ++c;
        counts[(size_t)k] = c;
    }
    return counts;
}

bool check_syndromes(const DecoderState& st, const ldpc::MatrixSet& set,
                     const std::vector<ldpc::Syndrome>& syndromes) {
    auto counts = unsatisfied_counts(st, set, syndromes);
    for (int c : counts)
        if (c != 0) return false;
    return true;
}

static double estimate_from_counts(const std::vector<int>& counts, const DecoderState& st,
                                   const ldpc::MatrixSet& set) {
    double u_cap = 0.5 - std::numeric_limits<double>::epsilon();
    double sum = 0.0;
    for (int k = 0; k < set.count(); ++k) {
        double u = (double)counts[(size_t)k] / (double)set.m();
        if (u > u_cap) u = u_cap;
        double d = st.work[(size_t)k].mean_check_degree;
        sum += (1.0 - std::pow(1.0 - 2.0 * u, 1.0 / d)) / 2.0;
    }
    return sum / (double)set.count();
}

double estimate_error_rate(const DecoderState& st, const ldpc::MatrixSet& set,
                           const std::vector<ldpc::Syndrome>& syndromes) {
    return estimate_from_counts(unsatisfied_counts(st, set, syndromes), st, set);
}

static void trace_line(std::ostream* out, int iteration, double est, const std::vector<int>& counts) {
    if (!out) return;
    (*out) << "{\"iteration\":" << iteration << ",\"error_estimate\":" << est << ",\"unsatisfied\":[";
    for (size_t k = 0; k < counts.size(); ++k) (*out) << (k ? "," : "") << counts[k];
    (*out) << "]}\n";
}

RoundOutcome decode_round(DecoderState& st, const ldpc::MatrixSet& set,
                          const std::vector<ldpc::Syndrome>& syndromes, const DecoderConfig& cfg) {
    st.cfg = cfg;
    for (int it = 0; it < cfg.max_iters; ++it) {
        std::vector<uint8_t> snapshot = st.word;
        iterate(st, set, syndromes);
        auto counts = unsatisfied_counts(st, set, syndromes);
        bool matched = true;
        for (int c : counts)
            if (c != 0) { matched = false; break; }
        double est = estimate_from_counts(counts, st, set);
        trace_line(cfg.trace, st.iteration, est, counts);
        if (matched) return RoundOutcome::Success;
        if (est > st.last_error_estimate) {
            st.word = std::move(snapshot);
            return RoundOutcome::ErrorRateRose;
        }
        st.last_error_estimate = est;
    }
    return RoundOutcome::IterationCapHit;
}

}  // namespace recon::decoder
