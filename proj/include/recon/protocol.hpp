#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "recon/decoder.hpp"
#include "recon/ldpc.hpp"
#include "recon/rate_adapt.hpp"
#include "recon/transport.hpp"

namespace recon::protocol {

enum class Scheme { SR, MR, SRCR, MRCR };

Scheme scheme_from_string(const std::string& s);
std::string to_string(Scheme s);
bool is_rate_compatible(Scheme s);  // SRCR/MRCR
bool is_multi_matrix(Scheme s);     // MR/MRCR

struct RateEntry {
    double rate = 0.0;
    const ldpc::MatrixSet* set = nullptr;
};

struct SessionConfig {
    Scheme scheme = Scheme::MRCR;
    int N = 3;  // matrices for MR/MRCR; SR/SRCR always use 1
    double f_d = 1.1;
    double delta = 0.02;
    int U_L = 100;
    std::vector<RateEntry> rate_table;  // ascending by rate
    uint64_t shared_seed = 1;           // jointly derived randomness (plan, P->S draws)
    uint64_t local_seed = 2;            // this party's private randomness (punctured fill)
    bool parallel_decoder = false;
    std::ostream* decoder_trace = nullptr;
    std::ostream* transcript = nullptr;  // JSON lines, one per exchanged message
};

struct RoundStat {
    int iterations = 0;
    std::string outcome;  // "success", "error-rate-rose", "iteration-cap", "retry"
    int p_remaining = 0;
    int s_after = 0;
};

struct SessionResult {
    bool success = false;
    std::vector<uint8_t> key;  // length n - p0 on success
    int rounds = 0;
    int s_final = 0;
    long long disclosed_bits = 0;  // N*m syndrome bits + |S| reveals
    double f = 0.0;                // valid iff success
    int iterations_total = 0;
    double rate = 0.0;
    int p0 = 0;
    std::string fail_reason;  // empty on success
    std::vector<RoundStat> round_stats;
    std::vector<std::string> transcript_digests;  // per-message frame digests, in order
};

// Largest available R0 with 1 - R0 >= h(e)*f_d.
// Throws RateInadmissibleError("BER out of supported range") when none fits.
double choose_rate(double e, double f_d, const std::vector<double>& rates);

// Joint puncture plan both parties derive from the shared seed: UPA for a
// single-matrix set (pool exhaustion falls back to a joint pseudorandom
// choice), MUPA otherwise.
rateadapt::PuncturePlan make_puncture_plan(const ldpc::MatrixSet& set, int p0,
                                           uint64_t shared_seed);

SessionResult run_alice(const std::vector<uint8_t>& X, double e, const SessionConfig& cfg,
                        Transport& transport);
SessionResult run_bob(const std::vector<uint8_t>& Y, double e, const SessionConfig& cfg,
                      Transport& transport);

// Runs both parties over an in-process transport (Bob on a second thread).
std::pair<SessionResult, SessionResult> run_session(const std::vector<uint8_t>& X,
                                                    const std::vector<uint8_t>& Y, double e,
                                                    const SessionConfig& alice_cfg,
                                                    const SessionConfig& bob_cfg);

}  // namespace recon::protocol
