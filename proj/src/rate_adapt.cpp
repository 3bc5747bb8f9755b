#include "recon/rate_adapt.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

#include <json.hpp>

#include "recon/metrics.hpp"
#include "recon/rng.hpp"

namespace recon::rateadapt {

using json = nlohmann::json;

PuncturePlan PuncturePlan::from_order(std::vector<int> order_) {
    PuncturePlan plan;
    plan.p0 = (int)order_.size();
    plan.order = std::move(order_);
    plan.P.insert(plan.order.begin(), plan.order.end());
    if ((int)plan.P.size() != plan.p0)
        throw std::invalid_argument("puncture plan: duplicate positions in order");
    return plan;
}

void PuncturePlan::check_invariants() const {
    if ((int)(P.size() + S.size()) != p0) throw std::logic_error("puncture plan: |P|+|S| != p0");
    if ((int)order.size() != p0) throw std::logic_error("puncture plan: order size != p0");
    for (int v : S)
        if (P.count(v)) throw std::logic_error("puncture plan: P and S overlap");
    for (int v : order)
        if (!P.count(v) && !S.count(v)) throw std::logic_error("puncture plan: order not covered");
}

std::string PuncturePlan::to_json() const {
    json j;
    j["p0"] = p0;
    j["order"] = order;
    j["P"] = std::vector<int>(P.begin(), P.end());
    j["S"] = std::vector<int>(S.begin(), S.end());
    return j.dump();
}

PuncturePlan PuncturePlan::parse_json(const std::string& text) {
    json j = json::parse(text);
    PuncturePlan plan;
    plan.p0 = j.at("p0").get<int>();
    plan.order = j.at("order").get<std::vector<int>>();
    auto p = j.at("P").get<std::vector<int>>();
    auto s = j.at("S").get<std::vector<int>>();
    plan.P.insert(p.begin(), p.end());
    plan.S.insert(s.begin(), s.end());
    plan.check_invariants();
    return plan;
}

int initial_budget(int m, int n, double e, double f_d) {
    if (e <= 0.0 || e >= 0.5) throw std::invalid_argument("initial_budget: e must be in (0, 0.5)");
    if (f_d <= 0.0) throw std::invalid_argument("initial_budget: f_d must be positive");
    double hf = metrics::binary_entropy(e) * f_d;
    if (hf >= 1.0)
        throw RateInadmissibleError("initial_budget: h(e)*f_d >= 1, no admissible puncturing");
    double numerator = (double)m - (double)n * hf;
    if (numerator < -1e-9 * (double)n)
        throw RateInadmissibleError("initial_budget: m <= n*h(e)*f_d, rate inadmissible");
    double p0 = std::floor(numerator / (1.0 - hf));
    if (p0 < 0.0) p0 = 0.0;
    return (int)p0;
}

namespace {

// Static 2-hop variable neighborhoods (union across the given matrices),
// excluding the node itself.
std::vector<std::vector<int>> two_hop_union(const std::vector<const ldpc::ParityCheckMatrix*>& mats) {
    int n = mats.front()->n_cols;
    std::vector<std::vector<int>> nbr((size_t)n);
    for (int v = 0; v < n; ++v) {
        auto& out = nbr[(size_t)v];
        for (const auto* H : mats)
            for (int c : H->col_adj[(size_t)v])
                for (int u : H->row_adj[(size_t)c])
                    if (u != v) out.push_back(u);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    return nbr;
}

}  // namespace

std::vector<int> upa(const ldpc::ParityCheckMatrix& H, uint64_t seed) {
    std::vector<const ldpc::ParityCheckMatrix*> mats{&H};
    auto nbr = two_hop_union(mats);
    int n = H.n_cols;
    std::vector<char> alive((size_t)n, 1);
    std::vector<int> order, minima;
    Rng rng(seed);
    for (;;) {
        size_t best = SIZE_MAX;
        minima.clear();
        for (int v = 0; v < n; ++v) {
            if (!alive[(size_t)v]) continue;
            size_t sz = nbr[(size_t)v].size();
            if (sz < best) {
                best = sz;
                minima.clear();
                minima.push_back(v);
            } else if (sz == best) {
                minima.push_back(v);
            }
        }
        if (minima.empty()) break;
        int pick = minima[(size_t)rng.bounded(minima.size())];
        order.push_back(pick);
        alive[(size_t)pick] = 0;
        for (int u : nbr[(size_t)pick]) alive[(size_t)u] = 0;
    }
    return order;
}

MupaResult mupa(const ldpc::MatrixSet& set, int p0, uint64_t seed) {
    if (set.count() < 1) throw std::invalid_argument("mupa: empty matrix set");
    int n = set.n();
    if (p0 < 0 || p0 > n) throw std::invalid_argument("mupa: p0 out of range");
    MupaResult res;
    if (p0 == 0) return res;

    std::vector<const ldpc::ParityCheckMatrix*> mats;
    for (const auto& H : set.matrices) mats.push_back(&H);
    auto nbr = two_hop_union(mats);

    // selected count per check, per matrix
    std::vector<std::vector<int>> chk_cnt(mats.size());
    for (size_t k = 0; k < mats.size(); ++k) chk_cnt[k].assign((size_t)mats[k]->n_rows, 0);
    std::vector<char> selected((size_t)n, 0);
    Rng rng(seed);

    auto tier_of = [&](int v) {
        int t = 0;
        for (size_t k = 0; k < mats.size(); ++k)
            for (int c : mats[k]->col_adj[(size_t)v]) t = std::max(t, chk_cnt[k][(size_t)c]);
        return t;
    };
    auto mark_selected = [&](int v, int tier) {
        selected[(size_t)v] = 1;
        for (size_t k = 0; k < mats.size(); ++k)
            for (int c : mats[k]->col_adj[(size_t)v]) ++chk_cnt[k][(size_t)c];
        res.order.push_back(v);
        res.tiers.push_back(tier);
    };

    std::vector<char> in_pool((size_t)n, 0);
    std::vector<int> minima;
    for (int k = 0; (int)res.order.size() < p0; ++k) {
        int max_tier = -1;
        for (int v = 0; v < n; ++v)
            if (!selected[(size_t)v]) max_tier = std::max(max_tier, tier_of(v));
        if (k > max_tier) {
            // tiers exhausted early: the rest is a joint pseudorandom choice
            std::vector<int> rest;
            for (int v = 0; v < n; ++v)
                if (!selected[(size_t)v]) rest.push_back(v);
            while ((int)res.order.size() < p0) {
                size_t idx = (size_t)rng.bounded(rest.size());
                int pick = rest[idx];
                rest[idx] = rest.back();
                rest.pop_back();
                mark_selected(pick, k);
            }
            break;
        }
        int pool_count = 0;
        for (int v = 0; v < n; ++v) {
            in_pool[(size_t)v] = (!selected[(size_t)v] && tier_of(v) == k) ? 1 : 0;
            pool_count += in_pool[(size_t)v];
        }
        while (pool_count > 0 && (int)res.order.size() < p0) {
            size_t best = SIZE_MAX;
            minima.clear();
            for (int v = 0; v < n; ++v) {
                if (!in_pool[(size_t)v]) continue;
                size_t sz = nbr[(size_t)v].size();
                if (sz < best) {
                    best = sz;
                    minima.clear();
                    minima.push_back(v);
                } else if (sz == best) {
                    minima.push_back(v);
                }
            }
            int pick = minima[(size_t)rng.bounded(minima.size())];
            mark_selected(pick, k);
            if (in_pool[(size_t)pick]) { in_pool[(size_t)pick] = 0; --pool_count; }
            for (int u : nbr[(size_t)pick])
                if (in_pool[(size_t)u]) { in_pool[(size_t)u] = 0; --pool_count; }
        }
    }
    return res;
}

std::vector<int> convert_p2s(PuncturePlan& plan, double delta, uint64_t seed) {
    if (delta <= 0.0 || delta >= 1.0) throw std::invalid_argument("convert_p2s: delta must be in (0,1)");
    if (plan.P.empty()) throw ExhaustedError("convert_p2s: no punctured positions left");
    double x = (double)plan.p0 * delta;
    size_t p2s;
    if (x >= 1.0)
        p2s = std::min((size_t)std::floor(x), plan.P.size());
    else
        p2s = 1;

    std::vector<int> pool(plan.P.begin(), plan.P.end());
    Rng rng(seed);
    std::vector<int> moved;
    moved.reserve(p2s);
    for (size_t t = 0; t < p2s; ++t) {
        size_t idx = t + (size_t)rng.bounded(pool.size() - t);
        std::swap(pool[t], pool[idx]);
        moved.push_back(pool[t]);
    }
    for (int v : moved) {
        plan.P.erase(v);
        plan.S.insert(v);
    }
    plan.check_invariants();
    return moved;
}

}  // namespace recon::rateadapt
