#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "recon/ldpc.hpp"
#include "recon/rate_adapt.hpp"

using namespace recon;

namespace {

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

// no check node may see two selected bits
bool untainted(const ldpc::ParityCheckMatrix& H, const std::vector<int>& sel) {
    std::set<int> s(sel.begin(), sel.end());
    for (const auto& row : H.row_adj) {
        int hits = 0;
        for (int v : row) hits += s.count(v) ? 1 : 0;
        if (hits > 1) return false;
    }
    return true;
}

double h2(double e) {  // independent of the library's entropy
    return -e * std::log2(e) - (1.0 - e) * std::log2(1.0 - e);
}

}  // namespace

TEST_CASE("initial budget reproduces the closed form") {
    // independent evaluation of the budget formula
    double h = h2(0.067);
    int expect = (int)std::floor((4000.0 - 10000.0 * h * 1.1) / (1.0 - h * 1.1));
    CHECK(expect == 162);
    CHECK(rateadapt::initial_budget(4000, 10000, 0.067, 1.1) == expect);

    // numerator exactly zero -> no puncturing headroom
    double f_d0 = 4000.0 / (10000.0 * h);
    CHECK(rateadapt::initial_budget(4000, 10000, 0.067, f_d0) == 0);

    // h(0.2)*1.1*10000 = 7943 > 4000: target unreachable at this rate
    CHECK_THROWS_AS(rateadapt::initial_budget(4000, 10000, 0.2, 1.1),
                    rateadapt::RateInadmissibleError);
}

TEST_CASE("upa picks one bit per disjoint check") {
    auto H = make_h(4, {{0, 1}, {2, 3}});
    auto sel = rateadapt::upa(H, 5);
    REQUIRE(sel.size() == 2);
    bool first = sel[0] == 0 || sel[0] == 1 || sel[1] == 0 || sel[1] == 1;
    bool second = sel[0] == 2 || sel[0] == 3 || sel[1] == 2 || sel[1] == 3;
    CHECK(first);
    CHECK(second);
    CHECK(untainted(H, sel));
}

TEST_CASE("upa output is untainted and deterministic on random codes") {
    for (uint64_t seed : {1u, 2u, 3u, 4u}) {
        auto set = ldpc::construct_set(40, 0.5, 1, seed);
        const auto& H = set.matrices.front();
        auto sel = rateadapt::upa(H, seed * 11);
        CHECK(!sel.empty());
        CHECK(untainted(H, sel));
        CHECK(sel == rateadapt::upa(H, seed * 11));
        std::set<int> uniq(sel.begin(), sel.end());
        CHECK(uniq.size() == sel.size());
    }
}

TEST_CASE("mupa with one matrix reduces to upa") {
    ldpc::MatrixSet set = ldpc::construct_set(40, 0.5, 1, 17);
    auto u = rateadapt::upa(set.matrices.front(), 99);
    auto m = rateadapt::mupa(set, (int)u.size(), 99);
    CHECK(m.order == u);
    for (int t : m.tiers) CHECK(t == 0);

    // any shorter budget is a prefix
    auto m3 = rateadapt::mupa(set, 3, 99);
    CHECK(m3.order == std::vector<int>(u.begin(), u.begin() + 3));
}

TEST_CASE("mupa covers the toy partition set tier by tier") {
    ldpc::MatrixSet set;
    set.matrices.push_back(make_h(4, {{0, 1}, {2, 3}}));
    set.matrices.push_back(make_h(4, {{0, 2}, {1, 3}}));
    set.matrices.push_back(make_h(4, {{0, 3}, {1, 2}}));

    auto r = rateadapt::mupa(set, 4, 12);
    REQUIRE(r.order.size() == 4);
    std::set<int> covered(r.order.begin(), r.order.end());
    CHECK(covered == std::set<int>{0, 1, 2, 3});
    for (size_t i = 1; i < r.tiers.size(); ++i) CHECK(r.tiers[i] >= r.tiers[i - 1]);
    // every pair shares a check in some matrix, so tiers climb one at a time
    CHECK(r.tiers == std::vector<int>{0, 1, 2, 2});
}

TEST_CASE("mupa tier-0 prefix is untainted in every matrix") {
    auto set = ldpc::construct_set(60, 0.5, 3, 23);
    auto r = rateadapt::mupa(set, 20, 7);
    REQUIRE(r.order.size() == 20);
    std::vector<int> tier0;
    for (size_t i = 0; i < r.order.size(); ++i)
        if (r.tiers[i] == 0) tier0.push_back(r.order[i]);
    CHECK(!tier0.empty());
    for (const auto& H : set.matrices) CHECK(untainted(H, tier0));
}

TEST_CASE("mupa with a zero budget is empty") {
    auto set = ldpc::construct_set(40, 0.5, 2, 3);
    auto r = rateadapt::mupa(set, 0, 1);
    CHECK(r.order.empty());
    CHECK(r.tiers.empty());
}

TEST_CASE("puncture-to-shorten conversion follows the piecewise rule") {
    std::vector<int> order;
    for (int i = 0; i < 161; ++i) order.push_back(i);

    {
        auto plan = rateadapt::PuncturePlan::from_order(order);
        auto moved = rateadapt::convert_p2s(plan, 0.02, 31);  // floor(3.22) = 3
        CHECK(moved.size() == 3);
        CHECK(plan.P.size() == 158);
        CHECK(plan.S.size() == 3);
        for (int v : moved) CHECK(plan.S.count(v) == 1);
        CHECK_NOTHROW(plan.check_invariants());
    }
    {
        // only two punctured bits left: move what remains
        auto plan = rateadapt::PuncturePlan::from_order(order);
        while (plan.P.size() > 2) {
            int v = *plan.P.begin();
            plan.P.erase(v);
            plan.S.insert(v);
        }
        auto moved = rateadapt::convert_p2s(plan, 0.02, 32);
        CHECK(moved.size() == 2);
        CHECK(plan.P.empty());
        CHECK(plan.S.size() == 161);
    }
    {
        // p0*delta = 0.8 < 1: still make progress
        std::vector<int> small(order.begin(), order.begin() + 40);
        auto plan = rateadapt::PuncturePlan::from_order(small);
        auto moved = rateadapt::convert_p2s(plan, 0.02, 33);
        CHECK(moved.size() == 1);
    }
    {
        auto plan = rateadapt::PuncturePlan::from_order({4, 9});
        plan.P.clear();
        plan.S = {4, 9};
        CHECK_THROWS_AS(rateadapt::convert_p2s(plan, 0.02, 34), rateadapt::ExhaustedError);
    }
}

TEST_CASE("conversion draws are deterministic and distinct") {
    std::vector<int> order = {3, 8, 1, 12, 7, 5, 20, 2};
    auto p1 = rateadapt::PuncturePlan::from_order(order);
    auto p2 = rateadapt::PuncturePlan::from_order(order);
    auto m1 = rateadapt::convert_p2s(p1, 0.5, 77);  // floor(4.0) = 4
    auto m2 = rateadapt::convert_p2s(p2, 0.5, 77);
    CHECK(m1 == m2);
    CHECK(m1.size() == 4);
    std::set<int> uniq(m1.begin(), m1.end());
    CHECK(uniq.size() == 4);
    CHECK(p1.P.size() + p1.S.size() == (size_t)p1.p0);
}

TEST_CASE("plan json round-trips") {
    auto plan = rateadapt::PuncturePlan::from_order({5, 2, 9});
    plan.P.erase(9);
    plan.S.insert(9);
    auto back = rateadapt::PuncturePlan::parse_json(plan.to_json());
    CHECK(back.p0 == plan.p0);
    CHECK(back.order == plan.order);
    CHECK(back.P == plan.P);
    CHECK(back.S == plan.S);
    CHECK_NOTHROW(back.check_invariants());
}
