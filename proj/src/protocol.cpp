#include "recon/protocol.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

#include "recon/digest.hpp"
#include "recon/metrics.hpp"
#include "recon/rng.hpp"

namespace recon::protocol {

Scheme scheme_from_string(const std::string& s) {
    if (s == "SR") return Scheme::SR;
    if (s == "MR") return Scheme::MR;
    if (s == "SRCR") return Scheme::SRCR;
    if (s == "MRCR") return Scheme::MRCR;
    throw std::invalid_argument("unknown scheme: " + s);
}

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::SR: return "SR";
        case Scheme::MR: return "MR";
        case Scheme::SRCR: return "SRCR";
        case Scheme::MRCR: return "MRCR";
    }
    return "?";
}

bool is_rate_compatible(Scheme s) { return s == Scheme::SRCR || s == Scheme::MRCR; }
bool is_multi_matrix(Scheme s) { return s == Scheme::MR || s == Scheme::MRCR; }

double choose_rate(double e, double f_d, const std::vector<double>& rates) {
    if (rates.empty()) throw std::invalid_argument("choose_rate: empty rate table");
    double hf = metrics::binary_entropy(e) * f_d;
    double best = -1.0;
    for (double r : rates)
        if (1.0 - r >= hf && r > best) best = r;
    if (best < 0.0) throw rateadapt::RateInadmissibleError("BER out of supported range");
    return best;
}

namespace {
// seed stream ids
constexpr uint64_t kStreamPlan = 1;
constexpr uint64_t kStreamFill = 7;
constexpr uint64_t kStreamP2SBase = 100;
}  // namespace

rateadapt::PuncturePlan make_puncture_plan(const ldpc::MatrixSet& set, int p0,
                                           uint64_t shared_seed) {
    uint64_t plan_seed = derive_seed(shared_seed, kStreamPlan);
    int n = set.n();
    std::vector<int> order;
    if (set.count() == 1) {
        order = rateadapt::upa(set.matrices.front(), plan_seed);
        if ((int)order.size() > p0) order.resize((size_t)p0);
        if ((int)order.size() < p0) {
            // untainted pool exhausted: the rest is a joint pseudorandom choice
            std::vector<char> taken((size_t)n, 0);
            for (int v : order) taken[(size_t)v] = 1;
            std::vector<int> rest;
            for (int v = 0; v < n; ++v)
                if (!taken[(size_t)v]) rest.push_back(v);
            Rng rng(derive_seed(plan_seed, 0xFA11));
            while ((int)order.size() < p0) {
                size_t idx = (size_t)rng.bounded(rest.size());
                order.push_back(rest[idx]);
                rest[idx] = rest.back();
                rest.pop_back();
            }
        }
    } else {
        order = rateadapt::mupa(set, p0, plan_seed).order;
    }
    return rateadapt::PuncturePlan::from_order(std::move(order));
}

namespace {

struct Setup {
    double rate = 0.0;
    const ldpc::MatrixSet* set = nullptr;
    int use_N = 1;
    int n = 0, m = 0, p0 = 0;
    rateadapt::PuncturePlan plan;
};

// Both parties run this identically from shared_seed, so the plan never
// needs to be transmitted.
Setup prepare(int n, double e, const SessionConfig& cfg) {
    Setup s;
    std::vector<double> rates;
    for (const auto& entry : cfg.rate_table) rates.push_back(entry.rate);
    s.rate = choose_rate(e, cfg.f_d, rates);
    for (const auto& entry : cfg.rate_table)
        if (entry.rate == s.rate) s.set = entry.set;
    if (!s.set || s.set->count() < 1)
        throw std::invalid_argument("session: no matrix set for chosen rate");
    s.use_N = is_multi_matrix(cfg.scheme) ? cfg.N : 1;
    if (s.use_N < 1) throw std::invalid_argument("session: N must be >= 1");
    if (is_multi_matrix(cfg.scheme) && s.use_N < 2)
        throw std::invalid_argument("session: MR/MRCR requires N >= 2");
    if (s.set->count() != s.use_N)
        throw std::invalid_argument("session: matrix set size does not match scheme N");
    if (s.set->n() != n) throw std::invalid_argument("session: key length does not match matrices");
    s.n = n;
    s.m = s.set->m();

    if (is_rate_compatible(cfg.scheme)) {
        s.p0 = rateadapt::initial_budget(s.m, n, e, cfg.f_d);
        s.plan = make_puncture_plan(*s.set, s.p0, cfg.shared_seed);
    }
    return s;
}

const char* outcome_name(decoder::RoundOutcome o) {
    switch (o) {
        case decoder::RoundOutcome::Success: return "success";
        case decoder::RoundOutcome::ErrorRateRose: return "error-rate-rose";
        case decoder::RoundOutcome::IterationCapHit: return "iteration-cap";
    }
    return "?";
}

const char* message_type_name(const Message& msg) {
    if (std::holds_alternative<SyndromeBundle>(msg)) return "syndromes";
    if (std::holds_alternative<ShortenReveal>(msg)) return "reveal";
    if (std::holds_alternative<Verdict>(msg)) return "verdict";
    return "abort";
}

// Records every exchanged message symmetrically on both sides, so that the
// two parties' transcripts can be compared byte for byte.
struct Transcript {
    const SessionConfig* cfg;
    SessionResult* result;
    int seq = 0;

    void log(const char* from, const Message& msg) {
        auto frame = encode_frame(msg);
        std::string digest = fnv1a64_hex(frame.data(), frame.size());
        result->transcript_digests.push_back(digest);
        if (cfg->transcript) {
            (*cfg->transcript) << "{\"seq\":" << seq << ",\"from\":\"" << from << "\",\"type\":\""
                               << message_type_name(msg) << "\",\"bytes\":" << frame.size()
                               << ",\"digest\":\"" << digest << "\"}\n";
        }
        ++seq;
    }
};

std::vector<uint8_t> strip_plan_positions(const std::vector<uint8_t>& word,
                                          const rateadapt::PuncturePlan& plan) {
    std::vector<char> drop(word.size(), 0);
    for (int v : plan.order) drop[(size_t)v] = 1;
    std::vector<uint8_t> key;
    key.reserve(word.size() - plan.order.size());
    for (size_t i = 0; i < word.size(); ++i)
        if (!drop[i]) key.push_back(word[i]);
    return key;
}

void finalize_success(SessionResult& res, const Setup& s, const std::vector<uint8_t>& word,
                      double e) {
    res.success = true;
    res.key = strip_plan_positions(word, s.plan);
    res.s_final = (int)s.plan.S.size();
    res.disclosed_bits = (long long)s.use_N * s.m + (long long)s.plan.S.size();
    res.f = metrics::efficiency(s.m, s.n, (int)s.plan.P.size(), (int)s.plan.S.size(), e);
}

void fail_result(SessionResult& res, const Setup& s, const std::string& reason) {
    res.success = false;
    res.fail_reason = reason;
    res.s_final = (int)s.plan.S.size();
    res.disclosed_bits = (long long)s.use_N * s.m + (long long)s.plan.S.size();
}

}  // namespace

SessionResult run_alice(const std::vector<uint8_t>& X, double e, const SessionConfig& cfg,
                        Transport& transport) {
    SessionResult res;
    Setup s;
    try {
        s = prepare((int)X.size(), e, cfg);
    } catch (const rateadapt::RateInadmissibleError& ex) {
        res.fail_reason = std::string("rate-inadmissible: ") + ex.what();
        return res;
    }
    res.rate = s.rate;
    res.p0 = s.p0;
    Transcript tr{&cfg, &res, 0};

    // step 2: fill punctured positions from this party's own generator
    std::vector<uint8_t> X_p = X;
    Rng fill(derive_seed(cfg.local_seed, kStreamFill));
    for (int v : s.plan.order) X_p[(size_t)v] = fill.bit();

    SyndromeBundle bundle;
    for (const auto& H : s.set->matrices) bundle.syndromes.push_back(ldpc::syndrome(H, X_p));
    Message out = std::move(bundle);
    tr.log("alice", out);
    transport.send(out);

    auto plan = s.plan;  // mutated round by round
    for (;;) {
        Message msg = transport.recv();
        tr.log("bob", msg);
        const auto* verdict = std::get_if<Verdict>(&msg);
        if (!verdict) throw TransportError("alice: expected verdict");
        ++res.rounds;
        if (verdict->success) {
            s.plan = plan;
            finalize_success(res, s, X_p, e);
            res.round_stats.push_back({0, "success", (int)plan.P.size(), (int)plan.S.size()});
            return res;
        }
        std::vector<int> moved;
        try {
            moved = rateadapt::convert_p2s(plan, cfg.delta,
                                           derive_seed(cfg.shared_seed, kStreamP2SBase + (uint64_t)res.rounds));
        } catch (const rateadapt::ExhaustedError&) {
            Message abort_msg = Abort{"punctured positions exhausted"};
            tr.log("alice", abort_msg);
            transport.send(abort_msg);
            s.plan = plan;
            fail_result(res, s, "exhausted");
            res.round_stats.push_back({0, "retry", (int)plan.P.size(), (int)plan.S.size()});
            return res;
        }
        ShortenReveal reveal;
        for (int v : moved) reveal.reveals.push_back({(uint32_t)v, X_p[(size_t)v]});
        Message rm = std::move(reveal);
        tr.log("alice", rm);
        transport.send(rm);
        res.round_stats.push_back({0, "retry", (int)plan.P.size(), (int)plan.S.size()});
    }
}

SessionResult run_bob(const std::vector<uint8_t>& Y, double e, const SessionConfig& cfg,
                      Transport& transport) {
    SessionResult res;
    Setup s;
    try {
        s = prepare((int)Y.size(), e, cfg);
    } catch (const rateadapt::RateInadmissibleError& ex) {
        res.fail_reason = std::string("rate-inadmissible: ") + ex.what();
        return res;
    }
    res.rate = s.rate;
    res.p0 = s.p0;
    Transcript tr{&cfg, &res, 0};

    std::vector<uint8_t> Y_p = Y;
    Rng fill(derive_seed(cfg.local_seed, kStreamFill));
    for (int v : s.plan.order) Y_p[(size_t)v] = fill.bit();

    Message first = transport.recv();
    tr.log("alice", first);
    auto* bundle = std::get_if<SyndromeBundle>(&first);
    if (!bundle) throw TransportError("bob: expected syndrome bundle");
    if ((int)bundle->syndromes.size() != s.use_N)
        throw TransportError("bob: syndrome count does not match scheme");
    for (const auto& z : bundle->syndromes)
        if ((int)z.bits.size() != s.m) throw TransportError("bob: syndrome length mismatch");
    const std::vector<ldpc::Syndrome>& Z = bundle->syndromes;

    decoder::DecoderConfig dcfg;
    dcfg.e = e;
    dcfg.max_iters = cfg.U_L;
    dcfg.parallel = cfg.parallel_decoder;
    dcfg.trace = cfg.decoder_trace;

    for (;;) {
        ++res.rounds;
        auto st = decoder::init(Y_p, s.plan, dcfg, *s.set);
        if (res.rounds > 1)
            st.last_error_estimate = decoder::estimate_error_rate(st, *s.set, Z);
        auto outcome = decoder::decode_round(st, *s.set, Z, dcfg);
        res.iterations_total += st.iteration;
        res.round_stats.push_back({st.iteration, outcome_name(outcome), (int)s.plan.P.size(),
                                   (int)s.plan.S.size()});
        bool ok = outcome == decoder::RoundOutcome::Success;
        Message verdict = Verdict{ok};
        tr.log("bob", verdict);
        transport.send(verdict);
        if (ok) {
            finalize_success(res, s, st.word, e);
            return res;
        }
        Message msg = transport.recv();
        tr.log("alice", msg);
        if (const auto* abort_msg = std::get_if<Abort>(&msg)) {
            fail_result(res, s, abort_msg->reason == "punctured positions exhausted"
                                    ? "exhausted"
                                    : "abort: " + abort_msg->reason);
            return res;
        }
        const auto* reveal = std::get_if<ShortenReveal>(&msg);
        if (!reveal) throw TransportError("bob: expected shorten reveal or abort");
        for (const auto& [pos, bit] : reveal->reveals) {
            if (pos >= (uint32_t)s.n || !s.plan.P.count((int)pos))
                throw TransportError("bob: revealed position is not punctured");
            Y_p[pos] = bit;
            s.plan.P.erase((int)pos);
            s.plan.S.insert((int)pos);
        }
        s.plan.check_invariants();
    }
}

std::pair<SessionResult, SessionResult> run_session(const std::vector<uint8_t>& X,
                                                    const std::vector<uint8_t>& Y, double e,
                                                    const SessionConfig& alice_cfg,
                                                    const SessionConfig& bob_cfg) {
    auto [ta, tb] = make_inprocess_pair();
    SessionResult ra, rb;
    std::string bob_error;
    std::thread bob([&] {
        try {
            rb = run_bob(Y, e, bob_cfg, *tb);
        } catch (const std::exception& ex) {
            bob_error = ex.what();
        }
        tb.reset();  // unblock the peer if it is still waiting
    });
    std::string alice_error;
    try {
        ra = run_alice(X, e, alice_cfg, *ta);
    } catch (const std::exception& ex) {
        alice_error = ex.what();
    }
    ta.reset();
    bob.join();
    if (!alice_error.empty()) {
        ra.success = false;
        ra.fail_reason = "session error: " + alice_error;
    }
    if (!bob_error.empty()) {
        rb.success = false;
        rb.fail_reason = "session error: " + bob_error;
    }
    return {ra, rb};
}

}  // namespace recon::protocol
