#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "recon/ldpc.hpp"
#include "recon/rate_adapt.hpp"

namespace recon::decoder {

enum class BitClass : uint8_t { Ordinary = 0, Punctured = 1, Shortened = 2 };
enum class RoundOutcome { Success, ErrorRateRose, IterationCapHit };

struct DecoderConfig {
    double e = 0.05;          // channel error-rate prior
    int max_iters = 100;      // U_L, iteration cap per communication round
    double llr_max = 30.0;    // saturation magnitude standing in for +/-inf
    bool parallel = false;    // OpenMP sweep kernels on/off
    std::ostream* trace = nullptr;  // per-iteration JSON lines when set
};

// Per-matrix Tanner-edge layout and message tables. Edges are stored
// check-major (ascending check, ascending variable within a check);
// var_edge gives each variable's edges in ascending check order.
struct MatrixWork {
    std::vector<int> chk_ptr;
    std::vector<int> chk_var;
    std::vector<int> var_ptr;
    std::vector<int> var_edge;
    std::vector<double> v2c;
    std::vector<double> c2v;
    double mean_check_degree = 0.0;
};

struct DecoderState {
    std::vector<uint8_t> word;       // current estimate of Y_p
    std::vector<double> log_prior;   // Log_i
    std::vector<BitClass> cls;
    std::vector<MatrixWork> work;    // one per matrix
    int iteration = 0;
    double last_error_estimate = 0.0;  // the running estimate
    DecoderConfig cfg;
};

// Sets priors (ordinary: +/-log((1-e)/e); punctured: 0; shortened:
// +/-llr_max), seeds every V2C message with its variable's prior, and
// initializes the running error estimate to cfg.e. Shortened positions in
// `word` must already hold their revealed values.
DecoderState init(const std::vector<uint8_t>& word, const rateadapt::PuncturePlan& plan,
                  const DecoderConfig& cfg, const ldpc::MatrixSet& set);

// One flooding sweep: per matrix C2V then V2C, then the aggregate
// soft/hard decision over all matrices (shortened bits excluded).
void iterate(DecoderState& state, const ldpc::MatrixSet& set,
             const std::vector<ldpc::Syndrome>& syndromes);

// True iff the current word reproduces every matrix's syndrome.
bool check_syndromes(const DecoderState& state, const ldpc::MatrixSet& set,
                     const std::vector<ldpc::Syndrome>& syndromes);

// Unsatisfied-check count per matrix for the current word.
std::vector<int> unsatisfied_counts(const DecoderState& state, const ldpc::MatrixSet& set,
                                    const std::vector<ldpc::Syndrome>& syndromes);

// Multi-syndrome estimate: per matrix, invert the expected unsatisfied
// fraction u_k = (1 - (1-2*eps)^d)/2 at the mean check degree d, then
// average over matrices.
double estimate_error_rate(const DecoderState& state, const ldpc::MatrixSet& set,
                           const std::vector<ldpc::Syndrome>& syndromes);

// Runs iterations with the comparison-of-error-rates stop rule: success on
// syndrome match; when the estimate rises the word reverts to the previous
// iteration's snapshot; IterationCapHit after cfg.max_iters iterations.
RoundOutcome decode_round(DecoderState& state, const ldpc::MatrixSet& set,
                          const std::vector<ldpc::Syndrome>& syndromes, const DecoderConfig& cfg);

}  // namespace recon::decoder
