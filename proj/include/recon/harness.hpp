#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "recon/ldpc.hpp"

namespace recon::harness {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SweepConfig {
    std::vector<std::string> schemes{"MRCR"};
    std::vector<int> n_list{5000};
    std::vector<double> rates{0.6, 0.7, 0.8};
    std::vector<double> snr_db{};
    std::vector<double> f_d_list{1.1};
    std::vector<double> delta_list{0.02};
    int trials = 100;
    int u_l = 100;
    uint64_t master_seed = 1;
    int workers = 1;
    int N = 3;                 // matrices for MR/MRCR
    uint64_t matrix_seed = 1;  // construction seed, independent of master_seed
    std::string out_dir;
    std::string matrix_cache;  // alist cache directory; empty = in-memory only

    // Strict parsing: unknown keys are reported by name. List-valued keys
    // also accept a single scalar.
    static SweepConfig from_json(const std::string& text);
    std::string to_json() const;
    void validate() const;
};

struct TrialRecord {
    std::string scheme;
    int n = 0;
    double rate = 0.0;
    double snr_db = 0.0;
    double e = 0.0;
    double f_d = 0.0;
    double delta = 0.0;
    int trial = 0;
    bool success = false;
    int rounds = 0;
    int iterations = 0;
    int s_final = 0;
    double f = 0.0;  // valid iff success
    int p0 = 0;
    double wall_s = 0.0;
};

struct PointAggregate {
    std::string scheme;
    int n = 0;
    double rate = 0.0;
    double snr_db = 0.0;
    double e = 0.0;
    double f_d = 0.0;
    double delta = 0.0;
    int trials = 0;
    int successes = 0;
    double fer = 0.0;
    double mean_f = 0.0;  // over successes; 0 when none
    int p0 = 0;
    double busy_s = 0.0;        // aggregate busy time / workers
    double throughput_bps = 0.0;
    bool skipped = false;
    std::string skip_reason;
};

struct SweepResult {
    std::vector<TrialRecord> trials;
    std::vector<PointAggregate> points;
    long long undetected_mismatches = 0;  // successes whose keys differ
    std::string digest;  // deterministic; wall-time-derived columns excluded
    std::string trials_csv;
    std::string points_csv;
    std::string summary_json;
};

struct KeyPair {
    std::vector<uint8_t> x;
    std::vector<uint8_t> y;
    int flips = 0;
};

// X uniform; Y = X with iid flips at probability e.
KeyPair gen_key_pair(int n, double e, uint64_t seed);

// Constructs or loads (from the alist cache directory) the matrix set for
// (n, rate, count) under `seed`. In-memory results are memoized.
class MatrixCache {
  public:
    MatrixCache(std::string dir, uint64_t seed) : dir_(std::move(dir)), seed_(seed) {}
    const ldpc::MatrixSet& get(int n, double rate, int count);

  private:
    std::string dir_;
    uint64_t seed_;
    std::map<std::tuple<int, long long, int>, ldpc::MatrixSet> mem_;
};

SweepResult run_sweep(const SweepConfig& cfg);

// Writes trials.csv, points.csv and summary.json into cfg.out_dir.
void write_sweep_outputs(const SweepConfig& cfg, const SweepResult& result);

}  // namespace recon::harness
