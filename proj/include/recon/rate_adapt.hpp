#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "recon/ldpc.hpp"

namespace recon::rateadapt {

struct RateInadmissibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExhaustedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Punctured/shortened bookkeeping for one session. |P| + |S| == p0 always;
// S grows only by moving members out of P.
struct PuncturePlan {
    int p0 = 0;
    std::vector<int> order;  // the p0 selected positions, in selection order
    std::set<int> P;
    std::set<int> S;

    static PuncturePlan from_order(std::vector<int> order_);
    std::string to_json() const;
    static PuncturePlan parse_json(const std::string& text);
    void check_invariants() const;  // throws std::logic_error on violation
};

// p0 = floor((m - n*h(e)*f_d) / (1 - h(e)*f_d)); s0 = 0 implicitly.
// Throws RateInadmissibleError when the target efficiency is not reachable
// at this rate (m <= n*h(e)*f_d or h(e)*f_d >= 1).
int initial_budget(int m, int n, double e, double f_d);

// Untainted puncturing: greedily selects variables so that no check node
// neighbors two selected bits; each pick minimizes the static 2-hop
// neighborhood size |N(v)|, ties broken by seeded uniform choice.
std::vector<int> upa(const ldpc::ParityCheckMatrix& H, uint64_t seed);

struct MupaResult {
    std::vector<int> order;
    std::vector<int> tiers;  // tier recorded at each selection, nondecreasing
};

// Multi-matrix untainted puncturing over all matrices of the set, tier by
// tier; tier(v) is the maximum count of already-selected bits on any check
// adjacent to v in any matrix, and N(v) is the union 2-hop neighborhood.
// Falls back to seeded uniform choice when the tiers exhaust early.
MupaResult mupa(const ldpc::MatrixSet& set, int p0, uint64_t seed);

// Moves P2S punctured positions to the shortened set per the piecewise rule
//   P2S = floor(p0*delta) if 1 <= p0*delta <= |P|
//         |P|             if 1 <= |P| < p0*delta
//         1               if p0*delta < 1
// and returns the moved positions. Throws ExhaustedError when P is empty.
std::vector<int> convert_p2s(PuncturePlan& plan, double delta, uint64_t seed);

}  // namespace recon::rateadapt
