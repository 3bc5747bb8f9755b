#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace recon::ldpc {

// Sparse binary parity-check matrix H (m x n) as a Tanner graph.
// row_adj[j] lists the variable indices of check j, col_adj[i] the check
// indices of variable i; both sides are kept sorted ascending so that every
// iteration over the graph is deterministic.
struct ParityCheckMatrix {
    int n_cols = 0;  // n, code length
    int n_rows = 0;  // m, check count
    std::vector<std::vector<int>> row_adj;
    std::vector<std::vector<int>> col_adj;

    double rate() const { return 1.0 - (double)n_rows / (double)n_cols; }
    long long edge_count() const {
        long long e = 0;
        for (const auto& r : row_adj) e += (long long)r.size();
        return e;
    }
    bool same_edges(const ParityCheckMatrix& o) const {
        return n_cols == o.n_cols && n_rows == o.n_rows && row_adj == o.row_adj;
    }
};

// An ordered family of N parity-check matrices sharing n and m.
struct MatrixSet {
    std::vector<ParityCheckMatrix> matrices;
    uint64_t seed = 0;

    int count() const { return (int)matrices.size(); }
    int n() const { return matrices.empty() ? 0 : matrices.front().n_cols; }
    int m() const { return matrices.empty() ? 0 : matrices.front().n_rows; }
};

struct Syndrome {
    std::vector<uint8_t> bits;

    bool operator==(const Syndrome&) const = default;
};

struct AlistParseError : std::runtime_error {
    int line;
    AlistParseError(const std::string& what, int line_)
        : std::runtime_error(what + " (line " + std::to_string(line_) + ")"), line(line_) {}
};

// Progressive-edge-growth construction with regular column degree 3.
// `count` matrices are built from per-matrix seeds derived from `seed`;
// when count > 1 the members are guaranteed pairwise distinct as edge sets.
MatrixSet construct_set(int n, double rate, int count, uint64_t seed);

// Z = H * x^T mod 2.
Syndrome syndrome(const ParityCheckMatrix& H, const std::vector<uint8_t>& x);

// alist interchange format (header "n m", max degrees, degree lists,
// 1-based zero-padded adjacency lists).
std::string to_alist(const ParityCheckMatrix& H);
ParityCheckMatrix from_alist(const std::string& text);

// Throws std::invalid_argument when any structural invariant is violated.
void validate(const ParityCheckMatrix& H);

}  // namespace recon::ldpc
