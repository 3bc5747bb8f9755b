#include "recon/ldpc.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "recon/rng.hpp"

namespace recon::ldpc {

void validate(const ParityCheckMatrix& H) {
    if (H.n_cols <= 0 || H.n_rows <= 0) throw std::invalid_argument("matrix: empty dimensions");
    if ((int)H.row_adj.size() != H.n_rows || (int)H.col_adj.size() != H.n_cols)
        throw std::invalid_argument("matrix: adjacency size mismatch");
    long long edges_rows = 0, edges_cols = 0;
    for (int j = 0; j < H.n_rows; ++j) {
        const auto& r = H.row_adj[j];
        if (r.empty()) throw std::invalid_argument("matrix: empty row " + std::to_string(j));
        for (size_t t = 0; t < r.size(); ++t) {
            if (r[t] < 0 || r[t] >= H.n_cols)
                throw std::invalid_argument("matrix: row index out of range");
            if (t > 0 && r[t] <= r[t - 1])
                throw std::invalid_argument("matrix: row adjacency not sorted/unique");
        }
        edges_rows += (long long)r.size();
    }
    for (int i = 0; i < H.n_cols; ++i) {
        const auto& c = H.col_adj[i];
        if (c.empty()) throw std::invalid_argument("matrix: empty column " + std::to_string(i));
        for (size_t t = 0; t < c.size(); ++t) {
            if (c[t] < 0 || c[t] >= H.n_rows)
                throw std::invalid_argument("matrix: column index out of range");
            if (t > 0 && c[t] <= c[t - 1])
                throw std::invalid_argument("matrix: column adjacency not sorted/unique");
            if (!std::binary_search(H.row_adj[c[t]].begin(), H.row_adj[c[t]].end(), i))
                throw std::invalid_argument("matrix: transpose inconsistency");
        }
        edges_cols += (long long)c.size();
    }
    if (edges_rows != edges_cols) throw std::invalid_argument("matrix: transpose inconsistency");
}

// One PEG matrix with regular column degree dv: each new edge goes to a check
// unreached by BFS from the variable (no new cycle), else to one at maximum
// BFS depth; ties broken by lowest current degree, then seeded uniform.
static ParityCheckMatrix peg_construct(int n, int m, int dv, Rng& rng) {
    ParityCheckMatrix H;
    H.n_cols = n;
    H.n_rows = m;
    H.row_adj.resize(m);
    H.col_adj.resize(n);

    std::vector<int> chk_deg(m, 0);
    std::vector<int> chk_stamp(m, -1), var_stamp(n, -1), chk_level(m, 0);
    std::vector<int> frontier, next_frontier, cand, minima;
    cand.reserve(m);

    for (int v = 0; v < n; ++v) {
        for (int t = 0; t < dv; ++t) {
            cand.clear();
            if (t == 0) {
                for (int c = 0; c < m; ++c) cand.push_back(c);
            } else {
                int epoch = v * dv + t;
                int reached = 0, max_level = -1, level = 0;
                frontier.clear();
                frontier.push_back(v);
                var_stamp[v] = epoch;
                while (!frontier.empty()) {
                    next_frontier.clear();
                    for (int fv : frontier) {
                        for (int c : H.col_adj[fv]) {
                            if (chk_stamp[c] == epoch) continue;
                            chk_stamp[c] = epoch;
                            chk_level[c] = level;
                            ++reached;
                            if (level > max_level) max_level = level;
                            for (int u : H.row_adj[c]) {
                                if (var_stamp[u] != epoch) {
                                    var_stamp[u] = epoch;
                                    next_frontier.push_back(u);
                                }
                            }
                        }
                    }
                    frontier.swap(next_frontier);
                    ++level;
                }
                if (reached < m) {
                    for (int c = 0; c < m; ++c)
                        if (chk_stamp[c] != epoch) cand.push_back(c);
                } else {
                    for (int c = 0; c < m; ++c)
                        if (chk_level[c] == max_level) cand.push_back(c);
                }
            }
            // never create a duplicate edge
            auto adjacent = [&](int c) {
                const auto& cur = H.col_adj[v];
                return std::find(cur.begin(), cur.end(), c) != cur.end();
            };
            int best = INT_MAX;
            minima.clear();
            for (int c : cand) {
                if (adjacent(c)) continue;
                if (chk_deg[c] < best) {
                    best = chk_deg[c];
                    minima.clear();
                    minima.push_back(c);
                } else if (chk_deg[c] == best) {
                    minima.push_back(c);
                }
            }
            if (minima.empty()) {
                // all candidates were already neighbors; fall back to any other check
                for (int c = 0; c < m; ++c) {
                    if (adjacent(c)) continue;
                    if (chk_deg[c] < best) {
                        best = chk_deg[c];
                        minima.clear();
                        minima.push_back(c);
                    } else if (chk_deg[c] == best) {
                        minima.push_back(c);
                    }
                }
            }
            int pick = minima[(size_t)rng.bounded(minima.size())];
            H.col_adj[v].push_back(pick);
            H.row_adj[pick].push_back(v);
            ++chk_deg[pick];
        }
    }
    for (auto& c : H.col_adj) std::sort(c.begin(), c.end());
    for (auto& r : H.row_adj) std::sort(r.begin(), r.end());
    return H;
}

MatrixSet construct_set(int n, double rate, int count, uint64_t seed) {
    if (n <= 0) throw std::invalid_argument("construct_set: n must be positive");
    if (count < 1) throw std::invalid_argument("construct_set: count must be >= 1");
    double m_real = (double)n * (1.0 - rate);
    long long m = std::llround(m_real);
    if (std::abs(m_real - (double)m) > 1e-9 * (double)n)
        throw std::invalid_argument("construct_set: n*(1-rate) is not an integer");
    if (m <= 0 || m >= n) throw std::invalid_argument("construct_set: rate out of range");
    if (m < 3) throw std::invalid_argument("construct_set: fewer checks than the column degree");

    MatrixSet set;
    set.seed = seed;
    uint64_t salt = 0;
    for (int k = 0; k < count; ++k) {
        for (int attempt = 0;; ++attempt) {
            if (attempt >= 64)
                throw std::runtime_error("construct_set: could not build pairwise-distinct matrices");
            uint64_t sk = (attempt == 0) ? derive_seed(seed, (uint64_t)k)
                                         : derive_seed(seed, (uint64_t)count + (++salt));
            Rng rng(sk);
            ParityCheckMatrix H = peg_construct(n, (int)m, 3, rng);
            bool dup = false;
            for (const auto& prev : set.matrices)
                if (prev.same_edges(H)) { dup = true; break; }
            if (!dup) {
                set.matrices.push_back(std::move(H));
                break;
            }
        }
    }
    return set;
}

Syndrome syndrome(const ParityCheckMatrix& H, const std::vector<uint8_t>& x) {
    if ((int)x.size() != H.n_cols) throw std::invalid_argument("syndrome: word length mismatch");
    Syndrome z;
    z.bits.resize(H.n_rows);
    for (int j = 0; j < H.n_rows; ++j) {
        uint8_t parity = 0;
        for (int i : H.row_adj[j]) parity ^= (x[i] & 1u);
        z.bits[j] = parity;
    }
    return z;
}

std::string to_alist(const ParityCheckMatrix& H) {
    validate(H);
    size_t maxcol = 0, maxrow = 0;
    for (const auto& c : H.col_adj) maxcol = std::max(maxcol, c.size());
    for (const auto& r : H.row_adj) maxrow = std::max(maxrow, r.size());
    std::ostringstream out;
    out << H.n_cols << ' ' << H.n_rows << '\n';
    out << maxcol << ' ' << maxrow << '\n';
    for (int i = 0; i < H.n_cols; ++i) out << H.col_adj[i].size() << (i + 1 < H.n_cols ? ' ' : '\n');
    for (int j = 0; j < H.n_rows; ++j) out << H.row_adj[j].size() << (j + 1 < H.n_rows ? ' ' : '\n');
    for (const auto& c : H.col_adj) {
        for (size_t t = 0; t < maxcol; ++t)
            out << (t < c.size() ? c[t] + 1 : 0) << (t + 1 < maxcol ? ' ' : '\n');
    }
    for (const auto& r : H.row_adj) {
        for (size_t t = 0; t < maxrow; ++t)
            out << (t < r.size() ? r[t] + 1 : 0) << (t + 1 < maxrow ? ' ' : '\n');
    }
    return out.str();
}

namespace {

struct LineReader {
    std::istringstream in;
    int line_no = 0;

    explicit LineReader(const std::string& text) : in(text) {}

    // next non-empty line as integers
    std::vector<long long> next_ints(const char* what) {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            std::istringstream ls(line);
            std::vector<long long> vals;
            std::string tok;
            bool bad = false;
            while (ls >> tok) {
                errno = 0;
                char* end = nullptr;
                long long v = std::strtoll(tok.c_str(), &end, 10);
                if (errno != 0 || end == tok.c_str() || *end != '\0') { bad = true; break; }
                vals.push_back(v);
            }
            if (bad) throw AlistParseError(std::string("alist: invalid integer in ") + what, line_no);
            if (!vals.empty()) return vals;
        }
        throw AlistParseError(std::string("alist: unexpected end of input, expected ") + what, line_no);
    }
};

std::vector<int> parse_adjacency(const std::vector<long long>& vals, long long degree,
                                 long long max_degree, long long upper, const char* what,
                                 int line_no) {
    if ((long long)vals.size() != degree && (long long)vals.size() != max_degree)
        throw AlistParseError(std::string("alist: wrong entry count in ") + what, line_no);
    std::vector<int> adj;
    for (long long t = 0; t < (long long)vals.size(); ++t) {
        long long v = vals[(size_t)t];
        if (t < degree) {
            if (v < 1 || v > upper)
                throw AlistParseError(std::string("alist: index out of range in ") + what, line_no);
            adj.push_back((int)(v - 1));
        } else if (v != 0) {
            throw AlistParseError(std::string("alist: nonzero padding in ") + what, line_no);
        }
    }
    std::sort(adj.begin(), adj.end());
    for (size_t t = 1; t < adj.size(); ++t)
        if (adj[t] == adj[t - 1])
            throw AlistParseError(std::string("alist: duplicate index in ") + what, line_no);
    return adj;
}

}  // namespace

ParityCheckMatrix from_alist(const std::string& text) {
    LineReader rd(text);
    auto header = rd.next_ints("header");
    if (header.size() != 2) throw AlistParseError("alist: header must be 'n m'", rd.line_no);
    long long n = header[0], m = header[1];
    if (n <= 0 || m <= 0 || n > 100000000 || m > 100000000)
        throw AlistParseError("alist: bad dimensions", rd.line_no);
    auto maxdeg = rd.next_ints("max degrees");
    if (maxdeg.size() != 2 || maxdeg[0] <= 0 || maxdeg[1] <= 0)
        throw AlistParseError("alist: bad max degrees", rd.line_no);
    long long maxcol = maxdeg[0], maxrow = maxdeg[1];

    auto col_deg = rd.next_ints("column degrees");
    if ((long long)col_deg.size() != n)
        throw AlistParseError("alist: column degree count mismatch", rd.line_no);
    for (auto d : col_deg)
        if (d < 1 || d > maxcol) throw AlistParseError("alist: column degree out of range", rd.line_no);
    auto row_deg = rd.next_ints("row degrees");
    if ((long long)row_deg.size() != m)
        throw AlistParseError("alist: row degree count mismatch", rd.line_no);
    for (auto d : row_deg)
        if (d < 1 || d > maxrow) throw AlistParseError("alist: row degree out of range", rd.line_no);

    ParityCheckMatrix H;
    H.n_cols = (int)n;
    H.n_rows = (int)m;
    H.col_adj.resize((size_t)n);
    H.row_adj.resize((size_t)m);
    for (long long i = 0; i < n; ++i) {
        auto vals = rd.next_ints("column adjacency");
        H.col_adj[(size_t)i] =
            parse_adjacency(vals, col_deg[(size_t)i], maxcol, m, "column adjacency", rd.line_no);
    }
    std::vector<std::vector<int>> derived_rows((size_t)m);
    for (long long i = 0; i < n; ++i)
        for (int j : H.col_adj[(size_t)i]) derived_rows[(size_t)j].push_back((int)i);
    for (long long j = 0; j < m; ++j) {
        auto vals = rd.next_ints("row adjacency");
        H.row_adj[(size_t)j] =
            parse_adjacency(vals, row_deg[(size_t)j], maxrow, n, "row adjacency", rd.line_no);
        if (H.row_adj[(size_t)j] != derived_rows[(size_t)j])
            throw AlistParseError("alist: row adjacency inconsistent with columns", rd.line_no);
    }
    validate(H);
    return H;
}

}  // namespace recon::ldpc
