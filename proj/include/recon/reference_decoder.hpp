#pragma once

#include <cstdint>
#include <vector>

#include "recon/ldpc.hpp"

namespace recon::refdec {

// Plain single-matrix LLR-BP kept as the serial reference for the
// multi-matrix decoder: straightforward message tables indexed
// [check][slot], no parallelism, no shared state. With N=1 the production
// decoder must reproduce this implementation's hard decisions bit for bit.
struct RefDecoder {
    const ldpc::ParityCheckMatrix* H = nullptr;
    int n = 0, m = 0;
    double llr_max = 30.0;
    std::vector<double> log_prior;
    std::vector<std::vector<double>> v2c;  // [check][slot]
    std::vector<std::vector<double>> c2v;
    std::vector<std::vector<std::pair<int, int>>> var_edges;  // var -> (check, slot), ascending check
    std::vector<uint8_t> word;

    // punctured/shortened are per-bit flags (possibly empty for none)
    void init(const ldpc::ParityCheckMatrix& H_, const std::vector<uint8_t>& y, double e,
              const std::vector<uint8_t>& punctured, const std::vector<uint8_t>& shortened,
              double llr_max_ = 30.0);

    void iterate(const ldpc::Syndrome& z);

    bool syndrome_matches(const ldpc::Syndrome& z) const;

  private:
    std::vector<uint8_t> is_shortened;
};

}  // namespace recon::refdec
