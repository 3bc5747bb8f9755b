#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <vector>

#include "recon/ldpc.hpp"

using namespace recon;

namespace {

// build a matrix straight from row lists; col_adj derived
ldpc::ParityCheckMatrix make_h(int n, std::vector<std::vector<int>> rows) {
    ldpc::ParityCheckMatrix H;
    H.n_cols = n;
    H.n_rows = (int)rows.size();
    H.row_adj = std::move(rows);
    H.col_adj.resize((size_t)n);
    for (int j = 0; j < H.n_rows; ++j)
        for (int v : H.row_adj[(size_t)j]) H.col_adj[(size_t)v].push_back(j);
    return H;
}

std::vector<uint8_t> dense_syndrome(const ldpc::ParityCheckMatrix& H,
                                    const std::vector<uint8_t>& x) {
    std::vector<uint8_t> z((size_t)H.n_rows, 0);
    for (int j = 0; j < H.n_rows; ++j)
        for (int v : H.row_adj[(size_t)j]) z[(size_t)j] ^= x[(size_t)v];
    return z;
}

}  // namespace

TEST_CASE("peg construction invariants on a small code") {
    auto set = ldpc::construct_set(10, 0.6, 1, 7);
    REQUIRE(set.count() == 1);
    const auto& H = set.matrices.front();
    CHECK(H.n_cols == 10);
    CHECK(H.n_rows == 4);
    CHECK(H.rate() == doctest::Approx(0.6));
    for (const auto& col : H.col_adj) CHECK(col.size() == 3);
    for (const auto& row : H.row_adj) CHECK(!row.empty());
    CHECK_NOTHROW(ldpc::validate(H));
}

TEST_CASE("construction is deterministic and seed-sensitive") {
    auto a = ldpc::construct_set(60, 0.5, 1, 42);
    auto b = ldpc::construct_set(60, 0.5, 1, 42);
    auto c = ldpc::construct_set(60, 0.5, 1, 43);
    CHECK(a.matrices[0].same_edges(b.matrices[0]));
    CHECK(!a.matrices[0].same_edges(c.matrices[0]));
}

TEST_CASE("set members are pairwise distinct") {
    auto set = ldpc::construct_set(10000, 0.6, 3, 1);
    REQUIRE(set.count() == 3);
    for (const auto& H : set.matrices) {
        CHECK(H.n_rows == 4000);
        CHECK_NOTHROW(ldpc::validate(H));
    }
    CHECK(!set.matrices[0].same_edges(set.matrices[1]));
    CHECK(!set.matrices[0].same_edges(set.matrices[2]));
    CHECK(!set.matrices[1].same_edges(set.matrices[2]));
}

TEST_CASE("bad construction parameters are rejected") {
    CHECK_THROWS_AS(ldpc::construct_set(10, 1.5, 1, 1), std::invalid_argument);   // m < 0
    CHECK_THROWS_AS(ldpc::construct_set(10, 0.8, 1, 1), std::invalid_argument);   // m = 2 < 3
    CHECK_THROWS_AS(ldpc::construct_set(10, 0.55, 1, 1), std::invalid_argument);  // m = 4.5
    CHECK_THROWS_AS(ldpc::construct_set(10, 0.6, 0, 1), std::invalid_argument);
}

TEST_CASE("syndrome matches a dense mod-2 product") {
    auto H = make_h(3, {{0, 1}, {1, 2}});
    auto z = ldpc::syndrome(H, {1, 0, 1});
    CHECK(z.bits == std::vector<uint8_t>{1, 1});
    CHECK(ldpc::syndrome(H, {0, 0, 0}).bits == std::vector<uint8_t>{0, 0});

    // linearity over every pair of words
    for (int xi = 0; xi < 8; ++xi)
        for (int yi = 0; yi < 8; ++yi) {
            std::vector<uint8_t> x, y, xy;
            for (int b = 0; b < 3; ++b) {
                x.push_back((uint8_t)((xi >> b) & 1));
                y.push_back((uint8_t)((yi >> b) & 1));
                xy.push_back((uint8_t)(x.back() ^ y.back()));
            }
            auto zx = ldpc::syndrome(H, x).bits;
            auto zy = ldpc::syndrome(H, y).bits;
            auto zxy = ldpc::syndrome(H, xy).bits;
            CHECK(dense_syndrome(H, x) == zx);
            for (size_t j = 0; j < zx.size(); ++j) CHECK((uint8_t)(zx[j] ^ zy[j]) == zxy[j]);
        }
}

TEST_CASE("alist round-trip preserves the graph") {
    auto H = make_h(3, {{0, 1}, {1, 2}});
    auto back = ldpc::from_alist(ldpc::to_alist(H));
    CHECK(back.same_edges(H));
    CHECK(back.col_adj == H.col_adj);

    auto set = ldpc::construct_set(30, 0.6, 1, 9);
    auto big = ldpc::from_alist(ldpc::to_alist(set.matrices[0]));
    CHECK(big.same_edges(set.matrices[0]));
}

TEST_CASE("alist files use 1-based zero-padded indices") {
    // hand-written fixture for rows {v1,v2},{v2,v3}
    const char* text =
        "3 2\n"
        "2 2\n"
        "1 2 1\n"
        "2 2\n"
        "1 0\n"
        "1 2\n"
        "2 0\n"
        "1 2\n"
        "2 3\n";
    auto H = ldpc::from_alist(text);
    CHECK(H.n_cols == 3);
    CHECK(H.n_rows == 2);
    CHECK(H.row_adj == std::vector<std::vector<int>>{{0, 1}, {1, 2}});
    CHECK(H.col_adj == std::vector<std::vector<int>>{{0}, {0, 1}, {1}});
}

TEST_CASE("truncated or corrupt alist input reports the line") {
    auto H = make_h(3, {{0, 1}, {1, 2}});
    std::string text = ldpc::to_alist(H);
    std::string cut = text.substr(0, text.rfind('\n', text.size() - 2));
    try {
        ldpc::from_alist(cut);
        FAIL("expected a parse error");
    } catch (const ldpc::AlistParseError& ex) {
        CHECK(ex.line > 0);
        CHECK(std::string(ex.what()).find("line") != std::string::npos);
    }
    CHECK_THROWS_AS(ldpc::from_alist(""), ldpc::AlistParseError);
    CHECK_THROWS_AS(ldpc::from_alist("3 2\nnope\n"), ldpc::AlistParseError);
}

TEST_CASE("structural validation catches broken graphs") {
    auto H = make_h(4, {{0, 1}, {2, 3}});
    CHECK_NOTHROW(ldpc::validate(H));

    auto dup = H;
    dup.row_adj[0] = {1, 1};
    dup.col_adj = {{}, {0, 0}, {1}, {1}};
    CHECK_THROWS_AS(ldpc::validate(dup), std::invalid_argument);

    auto range = H;
    range.row_adj[1] = {2, 7};
    CHECK_THROWS_AS(ldpc::validate(range), std::invalid_argument);

    auto empty_row = H;
    empty_row.row_adj[1] = {};
    empty_row.col_adj = {{0}, {0}, {}, {}};
    CHECK_THROWS_AS(ldpc::validate(empty_row), std::invalid_argument);

    auto skew = H;  // transpose inconsistency
    skew.col_adj[0] = {1};
    CHECK_THROWS_AS(ldpc::validate(skew), std::invalid_argument);
}
