#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>

#include <json.hpp>

#include "recon/harness.hpp"
#include "recon/metrics.hpp"
#include "recon/rate_adapt.hpp"

using namespace recon;

TEST_CASE("entropy and efficiency match hand-derived values") {
    CHECK(metrics::binary_entropy(0.5) == 1.0);
    CHECK(metrics::binary_entropy(0.0) == 0.0);
    CHECK(metrics::binary_entropy(1.0) == 0.0);
    CHECK(metrics::binary_entropy(0.067) ==
          doctest::Approx(0.3546271671967254).epsilon(1e-12));
    CHECK_THROWS_AS(metrics::binary_entropy(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(metrics::binary_entropy(1.1), std::invalid_argument);

    // with p = s = 0 this is (1 - R0) / h(e); h(0.25) frozen above
    CHECK(metrics::efficiency(4000, 10000, 0, 0, 0.25) ==
          doctest::Approx(0.4 / 0.8112781244591328).epsilon(1e-12));
    CHECK_THROWS_AS(metrics::efficiency(4000, 10000, 0, 0, 0.5), std::invalid_argument);
    CHECK(metrics::efficiency(4000, 10000, 161, 50, 0.067) ==
          doctest::Approx(1.105879431863447).epsilon(1e-12));
    CHECK_THROWS_AS(metrics::efficiency(10, 10, 5, 5, 0.1), std::invalid_argument);
}

TEST_CASE("snr to ber uses the gaussian tail") {
    CHECK(metrics::snr_to_ber(3.51) == doctest::Approx(0.06707191868347942).epsilon(1e-12));
    CHECK(metrics::snr_to_ber(7.48) == doctest::Approx(0.008992672499705727).epsilon(1e-12));
    CHECK(metrics::snr_to_ber(40.0) < 1e-100);  // e -> 0 with snr
    CHECK(metrics::snr_to_ber(40.0) > 0.0);
    CHECK(metrics::snr_to_ber(-20.0) < 0.5);
    for (double s = 0.0; s < 10.0; s += 0.5)
        CHECK(metrics::snr_to_ber(s + 0.5) < metrics::snr_to_ber(s));
}

TEST_CASE("throughput is plain arithmetic") {
    CHECK(metrics::throughput(500, 5000, 161, 10.0) == doctest::Approx(241950.0).epsilon(1e-12));
    CHECK(metrics::throughput(0, 5000, 161, 10.0) == 0.0);
    CHECK_THROWS_AS(metrics::throughput(1, 5000, 161, 0.0), std::invalid_argument);
}

TEST_CASE("initial budget leaves efficiency just above target") {
    // floor() under-spends the puncturing budget, so the first-round
    // efficiency lands at or slightly above f_d, never below
    struct Case {
        int m, n;
        double e, f_d;
    } cases[] = {{4000, 10000, 0.067, 1.1}, {2000, 5000, 0.05, 1.15}, {1200, 4000, 0.03, 1.05}};
    for (const auto& c : cases) {
        int p0 = rateadapt::initial_budget(c.m, c.n, c.e, c.f_d);
        double h = metrics::binary_entropy(c.e);
        double f = metrics::efficiency(c.m, c.n, p0, 0, c.e);
        CHECK(f >= c.f_d - 1e-12);
        double slack = (c.n - c.m) / (h * (double)(c.n - p0 - 1) * (double)(c.n - p0 - 1));
        CHECK(f <= c.f_d + slack + 1e-12);
    }
}

TEST_CASE("key pairs flip at the requested rate") {
    auto kp = harness::gen_key_pair(1000000, 0.1, 7);
    double sigma = std::sqrt(0.1 * 0.9 / 1000000.0);
    CHECK(std::abs(kp.flips / 1000000.0 - 0.1) <= 3.0 * sigma);
    int measured = 0;
    for (size_t i = 0; i < kp.x.size(); ++i) measured += kp.x[i] != kp.y[i];
    CHECK(measured == kp.flips);

    auto again = harness::gen_key_pair(1000000, 0.1, 7);
    CHECK(again.x == kp.x);
    CHECK(again.y == kp.y);

    auto clean = harness::gen_key_pair(1000, 1e-12, 3);
    CHECK(clean.flips == 0);
    CHECK(clean.x == clean.y);

    CHECK_THROWS_AS(harness::gen_key_pair(10, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(harness::gen_key_pair(10, 0.5, 1), std::invalid_argument);
}

TEST_CASE("sweep config parses strictly") {
    auto cfg = harness::SweepConfig::from_json(
        R"({"schemes":["SRCR"],"n":400,"snr_db":[4.2,5.0],"trials":3,"master_seed":9})");
    CHECK(cfg.schemes == std::vector<std::string>{"SRCR"});
    CHECK(cfg.n_list == std::vector<int>{400});  // scalar accepted for a list key
    CHECK(cfg.snr_db == std::vector<double>{4.2, 5.0});
    CHECK(cfg.trials == 3);
    CHECK(cfg.master_seed == 9);

    auto echo = harness::SweepConfig::from_json(cfg.to_json());
    CHECK(echo.to_json() == cfg.to_json());

    try {
        harness::SweepConfig::from_json(R"({"fd_":[1.1]})");
        FAIL("expected a config error");
    } catch (const harness::ConfigError& ex) {
        CHECK(std::string(ex.what()).find("fd_") != std::string::npos);
    }
    CHECK_THROWS_AS(harness::SweepConfig::from_json("[1,2]"), harness::ConfigError);
    CHECK_THROWS_AS(harness::SweepConfig::from_json("{nope"), harness::ConfigError);

    harness::SweepConfig empty;
    CHECK_THROWS_AS(empty.validate(), harness::ConfigError);  // no snr grid
}

TEST_CASE("matrix cache persists alist files") {
    auto dir = std::filesystem::temp_directory_path() / "recon_cache_test";
    std::filesystem::remove_all(dir);
    {
        harness::MatrixCache cache(dir.string(), 5);
        const auto& set = cache.get(60, 0.5, 2);
        CHECK(set.count() == 2);
        CHECK(&cache.get(60, 0.5, 2) == &set);  // memoized
    }
    size_t files = 0;
    for (auto& p : std::filesystem::directory_iterator(dir))
        files += p.path().extension() == ".alist";
    CHECK(files == 2);

    harness::MatrixCache reload(dir.string(), 5);
    const auto& loaded = reload.get(60, 0.5, 2);
    auto fresh = ldpc::construct_set(60, 0.5, 2, 5);
    CHECK(loaded.matrices[0].same_edges(fresh.matrices[0]));
    CHECK(loaded.matrices[1].same_edges(fresh.matrices[1]));
    std::filesystem::remove_all(dir);
}

TEST_CASE("sweeps are deterministic and complete") {
    harness::SweepConfig cfg;
    cfg.schemes = {"SRCR", "MRCR"};
    cfg.n_list = {400};
    cfg.rates = {0.6, 0.7, 0.8};
    cfg.snr_db = {4.4};
    cfg.delta_list = {0.2};
    cfg.trials = 3;
    cfg.N = 3;
    cfg.master_seed = 11;
    cfg.matrix_seed = 2;

    auto r1 = harness::run_sweep(cfg);
    CHECK(r1.trials.size() == 6);
    CHECK(r1.points.size() == 2);
    CHECK(r1.undetected_mismatches == 0);
    for (size_t i = 0; i < r1.trials.size(); ++i) {
        CHECK(r1.trials[i].trial == (int)(i % 3));
        CHECK(r1.trials[i].scheme == (i < 3 ? "SRCR" : "MRCR"));
    }
    for (const auto& p : r1.points) {
        CHECK(p.trials == 3);
        CHECK(!p.skipped);
        CHECK(p.rate == 0.6);
        if (p.successes > 0) CHECK(p.throughput_bps > 0.0);
    }

    auto r2 = harness::run_sweep(cfg);
    CHECK(r1.digest == r2.digest);
    CHECK(r1.trials_csv.substr(0, r1.trials_csv.find('\n')) ==
          "scheme,n,rate,snr_db,e,f_d,delta,trial,success,rounds,iterations,s_final,f,p0,wall_s");
    CHECK(r1.points_csv.substr(0, r1.points_csv.find('\n')) ==
          "scheme,n,rate,snr_db,e,f_d,delta,trials,successes,fer,mean_f,p0,busy_s,"
          "throughput_bps,skipped,skip_reason");

    auto summary = nlohmann::json::parse(r1.summary_json);
    CHECK(summary["digest"] == r1.digest);
    CHECK(summary["points"].size() == 2);
    CHECK(summary["undetected_mismatches"] == 0);
    CHECK(summary["config"]["trials"] == 3);
}

TEST_CASE("inadmissible grid points are skipped with a reason") {
    harness::SweepConfig cfg;
    cfg.schemes = {"SRCR"};
    cfg.n_list = {400};
    cfg.snr_db = {1.0, 4.4};  // 1 dB is out of range for every available rate
    cfg.delta_list = {0.2};
    cfg.trials = 2;
    cfg.master_seed = 12;

    auto r = harness::run_sweep(cfg);
    REQUIRE(r.points.size() == 2);
    CHECK(r.points[0].skipped);
    CHECK(!r.points[0].skip_reason.empty());
    CHECK(!r.points[1].skipped);
    CHECK(r.trials.size() == 2);  // only the admissible point ran
}

TEST_CASE("sweep outputs land in the requested directory") {
    harness::SweepConfig cfg;
    cfg.schemes = {"SRCR"};
    cfg.n_list = {400};
    cfg.snr_db = {4.4};
    cfg.delta_list = {0.2};
    cfg.trials = 2;
    cfg.master_seed = 13;
    auto dir = std::filesystem::temp_directory_path() / "recon_sweep_test";
    std::filesystem::remove_all(dir);
    cfg.out_dir = dir.string();

    auto r = harness::run_sweep(cfg);
    harness::write_sweep_outputs(cfg, r);
    CHECK(std::filesystem::exists(dir / "trials.csv"));
    CHECK(std::filesystem::exists(dir / "points.csv"));
    CHECK(std::filesystem::exists(dir / "summary.json"));
    std::filesystem::remove_all(dir);
}
