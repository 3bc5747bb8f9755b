// recon: command line front end for the reconciliation library.
//
// Subcommands:
//   construct  build a matrix set and write alist files + manifest
//   plan       print the joint puncture plan for a configuration
//   reconcile  run one session (in-process, or over TCP with --listen/--connect)
//   sweep      run an experiment grid and write trials.csv/points.csv/summary.json
//
// stdout carries machine-readable JSON only; diagnostics go to stderr
// (set RECON_LOG=info or debug for more).
//
// Exit codes: 0 ok, 2 reconciliation failed, 3 bad configuration, 4 transport error.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "recon/digest.hpp"
#include "recon/harness.hpp"
#include "recon/metrics.hpp"
#include "recon/protocol.hpp"
#include "recon/rng.hpp"
#include "recon/transport.hpp"

using json = nlohmann::json;
using namespace recon;

namespace {

int log_level() {
    const char* env = std::getenv("RECON_LOG");
    if (!env) return 0;
    std::string s(env);
    if (s == "debug") return 2;
    if (s == "info") return 1;
    return 0;
}

void info(const std::string& msg) {
    if (log_level() >= 1) std::fprintf(stderr, "recon: %s\n", msg.c_str());
}

struct CommonOpts {
    int n = 5000;
    double rate = 0.0;  // 0 = choose from default table
    int N = 3;
    double e = 0.0;
    double snr = 0.0;
    double f_d = 1.1;
    uint64_t seed = 1;
    uint64_t matrix_seed = 1;
    std::string cache;
};

double resolve_e(const CommonOpts& o, bool e_set, bool snr_set) {
    if (e_set == snr_set)
        throw harness::ConfigError("exactly one of --e and --snr must be given");
    return e_set ? o.e : metrics::snr_to_ber(o.snr);
}

std::string key_digest(const std::vector<uint8_t>& key) {
    return fnv1a64_hex(key.data(), key.size());
}

json result_json(const protocol::SessionResult& r, bool dump_key) {
    json j;
    j["success"] = r.success;
    j["rounds"] = r.rounds;
    j["s_final"] = r.s_final;
    j["disclosed_bits"] = r.disclosed_bits;
    j["iterations_total"] = r.iterations_total;
    j["rate"] = r.rate;
    j["p0"] = r.p0;
    if (r.success) {
        j["f"] = r.f;
        j["key_bits"] = (long long)r.key.size();
        j["key_digest"] = key_digest(r.key);
        if (dump_key) {
            std::string bits;
            bits.reserve(r.key.size());
            for (uint8_t b : r.key) bits += b ? '1' : '0';
            j["key"] = bits;
        }
    } else {
        j["fail_reason"] = r.fail_reason;
    }
    return j;
}

std::string alist_name(int n, double rate, int N, uint64_t seed, int k) {
    std::ostringstream name;
    name << "n" << n << "_r" << std::llround(rate * 1000000.0) << "_N" << N << "_s" << seed << "_k"
         << k << ".alist";
    return name.str();
}

int cmd_construct(const CommonOpts& o, const std::string& out_dir) {
    harness::MatrixCache cache(out_dir, o.matrix_seed);
    const ldpc::MatrixSet& set = cache.get(o.n, o.rate, o.N);  // writes the alist files
    json manifest;
    manifest["n"] = o.n;
    manifest["rate"] = o.rate;
    manifest["N"] = o.N;
    manifest["seed"] = o.matrix_seed;
    manifest["m"] = set.m();
    json files = json::array();
    for (int k = 0; k < o.N; ++k) {
        std::string name = alist_name(o.n, o.rate, o.N, o.matrix_seed, k);
        std::ifstream in(std::filesystem::path(out_dir) / name);
        std::stringstream ss;
        ss << in.rdbuf();
        files.push_back({{"file", name}, {"digest", fnv1a64_hex(ss.str())}});
    }
    manifest["files"] = std::move(files);
    std::string text = manifest.dump(2);
    std::ofstream(std::filesystem::path(out_dir) / "manifest.json") << text << "\n";
    std::cout << text << "\n";
    return 0;
}

int cmd_plan(const CommonOpts& o, bool e_set, bool snr_set) {
    double e = resolve_e(o, e_set, snr_set);
    harness::MatrixCache cache(o.cache, o.matrix_seed);
    const ldpc::MatrixSet& set = cache.get(o.n, o.rate, o.N);
    int p0 = rateadapt::initial_budget(set.m(), o.n, e, o.f_d);
    rateadapt::PuncturePlan plan = protocol::make_puncture_plan(set, p0, o.seed);
    json j;
    j["n"] = o.n;
    j["rate"] = o.rate;
    j["N"] = o.N;
    j["e"] = e;
    j["f_d"] = o.f_d;
    j["plan"] = json::parse(plan.to_json());
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct ReconcileOpts {
    CommonOpts c;
    std::string scheme = "MRCR";
    double delta = 0.02;
    int u_l = 100;
    std::string listen;
    std::string connect;
    bool dump_key = false;
};

int cmd_reconcile(const ReconcileOpts& o, bool e_set, bool snr_set) {
    double e = resolve_e(o.c, e_set, snr_set);
    protocol::Scheme scheme = protocol::scheme_from_string(o.scheme);
    std::vector<double> rates =
        o.c.rate > 0.0 ? std::vector<double>{o.c.rate} : std::vector<double>{0.6, 0.7, 0.8};
    double rate = protocol::choose_rate(e, o.c.f_d, rates);
    int use_N = protocol::is_multi_matrix(scheme) ? o.c.N : 1;
    harness::MatrixCache cache(o.c.cache, o.c.matrix_seed);
    const ldpc::MatrixSet& set = cache.get(o.c.n, rate, use_N);
    info("rate " + std::to_string(rate) + ", e " + std::to_string(e));

    // Both processes derive identical keys and seeds from --seed, so a
    // two-terminal run needs no out-of-band key exchange.
    uint64_t base = o.c.seed;
    harness::KeyPair kp = harness::gen_key_pair(o.c.n, e, derive_seed(base, 0));
    protocol::SessionConfig cfg;
    cfg.scheme = scheme;
    cfg.N = use_N;
    cfg.f_d = o.c.f_d;
    cfg.delta = o.delta;
    cfg.U_L = o.u_l;
    cfg.rate_table = {{rate, &set}};
    cfg.shared_seed = derive_seed(base, 1);

    if (!o.listen.empty() && !o.connect.empty())
        throw harness::ConfigError("--listen and --connect are mutually exclusive");
    if (!o.listen.empty()) {
        auto [host, port] = protocol::parse_address(o.listen);
        cfg.local_seed = derive_seed(base, 2);
        info("listening on " + host + ":" + std::to_string(port));
        auto transport = protocol::listen_socket(host, port);
        auto r = protocol::run_alice(kp.x, e, cfg, *transport);
        std::cout << result_json(r, o.dump_key).dump(2) << "\n";
        return r.success ? 0 : 2;
    }
    if (!o.connect.empty()) {
        auto [host, port] = protocol::parse_address(o.connect);
        cfg.local_seed = derive_seed(base, 3);
        info("connecting to " + host + ":" + std::to_string(port));
        auto transport = protocol::connect_socket(host, port);
        auto r = protocol::run_bob(kp.y, e, cfg, *transport);
        std::cout << result_json(r, o.dump_key).dump(2) << "\n";
        return r.success ? 0 : 2;
    }

    protocol::SessionConfig acfg = cfg, bcfg = cfg;
    acfg.local_seed = derive_seed(base, 2);
    bcfg.local_seed = derive_seed(base, 3);
    auto [ra, rb] = protocol::run_session(kp.x, kp.y, e, acfg, bcfg);
    json j;
    j["alice"] = result_json(ra, o.dump_key);
    j["bob"] = result_json(rb, o.dump_key);
    j["keys_match"] = ra.success && rb.success && ra.key == rb.key;
    j["flips"] = kp.flips;
    std::cout << j.dump(2) << "\n";
    return ra.success && rb.success ? 0 : 2;
}

struct SweepOpts {
    std::string config_file;
    std::string out_dir;
    std::vector<std::string> schemes;
    std::vector<int> n_list;
    std::vector<double> rates, snr, f_d, delta;
    int trials = 0, u_l = 0, workers = 0, N = 0;
    uint64_t seed = 0;
    uint64_t matrix_seed = 0;
    std::string cache;
};

int cmd_sweep(const SweepOpts& o, const CLI::App* sub) {
    harness::SweepConfig cfg;
    if (!o.config_file.empty()) {
        std::ifstream in(o.config_file);
        if (!in) throw harness::ConfigError("cannot read config file " + o.config_file);
        std::stringstream ss;
        ss << in.rdbuf();
        cfg = harness::SweepConfig::from_json(ss.str());
    }
    auto given = [&](const char* flag) { return sub->count(flag) > 0; };
    if (given("--scheme")) cfg.schemes = o.schemes;
    if (given("--n")) cfg.n_list = o.n_list;
    if (given("--rates")) cfg.rates = o.rates;
    if (given("--snr")) cfg.snr_db = o.snr;
    if (given("--fd")) cfg.f_d_list = o.f_d;
    if (given("--delta")) cfg.delta_list = o.delta;
    if (given("--trials")) cfg.trials = o.trials;
    if (given("--ul")) cfg.u_l = o.u_l;
    if (given("--seed")) cfg.master_seed = o.seed;
    if (given("--workers")) cfg.workers = o.workers;
    if (given("--N")) cfg.N = o.N;
    if (given("--matrix-seed")) cfg.matrix_seed = o.matrix_seed;
    if (given("--cache")) cfg.matrix_cache = o.cache;
    if (given("--out")) cfg.out_dir = o.out_dir;
    if (cfg.out_dir.empty()) throw harness::ConfigError("--out (or out_dir in the config) is required");

    harness::SweepResult result = harness::run_sweep(cfg);
    harness::write_sweep_outputs(cfg, result);
    std::cout << result.summary_json << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rate-compatible information reconciliation for QKD"};
    app.require_subcommand(1);

    CommonOpts c;
    ReconcileOpts rec;
    SweepOpts sw;
    std::string out_dir;

    auto* construct = app.add_subcommand("construct", "build a matrix set, write alist files");
    construct->add_option("--n", c.n, "key length")->required();
    construct->add_option("--rate", c.rate, "code rate R0")->required();
    construct->add_option("--N", c.N, "matrices in the set")->default_val(1);
    construct->add_option("--seed", c.matrix_seed, "construction seed")->default_val(1);
    construct->add_option("--out", out_dir, "output directory")->required();

    auto* plan = app.add_subcommand("plan", "print the joint puncture plan");
    plan->add_option("--n", c.n, "key length");
    plan->add_option("--rate", c.rate, "code rate R0")->required();
    plan->add_option("--N", c.N, "matrices in the set");
    auto* plan_e = plan->add_option("--e", c.e, "channel BER");
    auto* plan_snr = plan->add_option("--snr", c.snr, "channel SNR in dB");
    plan->add_option("--fd", c.f_d, "target efficiency f_d");
    plan->add_option("--seed", c.seed, "shared session seed");
    plan->add_option("--matrix-seed", c.matrix_seed, "construction seed");
    plan->add_option("--cache", c.cache, "alist cache directory");

    auto* reconcile = app.add_subcommand("reconcile", "run one reconciliation session");
    reconcile->add_option("--scheme", rec.scheme, "SR, MR, SRCR or MRCR");
    reconcile->add_option("--n", rec.c.n, "key length");
    reconcile->add_option("--rate", rec.c.rate, "force code rate (default: choose from 0.6/0.7/0.8)");
    reconcile->add_option("--N", rec.c.N, "matrices for MR/MRCR");
    auto* rec_e = reconcile->add_option("--e", rec.c.e, "channel BER");
    auto* rec_snr = reconcile->add_option("--snr", rec.c.snr, "channel SNR in dB");
    reconcile->add_option("--fd", rec.c.f_d, "target efficiency f_d");
    reconcile->add_option("--delta", rec.delta, "P->S conversion fraction");
    reconcile->add_option("--ul", rec.u_l, "iteration cap U_L");
    reconcile->add_option("--seed", rec.c.seed, "session seed (keys + randomness)");
    reconcile->add_option("--matrix-seed", rec.c.matrix_seed, "construction seed");
    reconcile->add_option("--cache", rec.c.cache, "alist cache directory");
    reconcile->add_option("--listen", rec.listen, "run as Alice on host:port");
    reconcile->add_option("--connect", rec.connect, "run as Bob, connect to host:port");
    reconcile->add_flag("--dump-key", rec.dump_key, "include raw key bits in the output");

    auto* sweep = app.add_subcommand("sweep", "run an experiment grid");
    sweep->add_option("--config", sw.config_file, "JSON config file");
    sweep->add_option("--scheme", sw.schemes, "schemes to sweep");
    sweep->add_option("--n", sw.n_list, "key lengths");
    sweep->add_option("--rates", sw.rates, "available code rates");
    sweep->add_option("--snr", sw.snr, "SNR grid in dB");
    sweep->add_option("--fd", sw.f_d, "target efficiencies");
    sweep->add_option("--delta", sw.delta, "conversion fractions");
    sweep->add_option("--trials", sw.trials, "trials per point");
    sweep->add_option("--ul", sw.u_l, "iteration cap U_L");
    sweep->add_option("--seed", sw.seed, "master seed");
    sweep->add_option("--workers", sw.workers, "parallel trial workers");
    sweep->add_option("--N", sw.N, "matrices for MR/MRCR");
    sweep->add_option("--matrix-seed", sw.matrix_seed, "construction seed");
    sweep->add_option("--cache", sw.cache, "alist cache directory");
    sweep->add_option("--out", sw.out_dir, "output directory");

    try {
        app.parse(argc, argv);
        if (construct->parsed()) return cmd_construct(c, out_dir);
        if (plan->parsed()) return cmd_plan(c, plan_e->count() > 0, plan_snr->count() > 0);
        if (reconcile->parsed())
            return cmd_reconcile(rec, rec_e->count() > 0, rec_snr->count() > 0);
        if (sweep->parsed()) return cmd_sweep(sw, sweep);
        return 3;
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 3;
    } catch (const protocol::TransportError& e) {
        std::fprintf(stderr, "recon: transport error: %s\n", e.what());
        return 4;
    } catch (const rateadapt::ExhaustedError& e) {
        std::fprintf(stderr, "recon: %s\n", e.what());
        return 2;
    } catch (const harness::ConfigError& e) {
        std::fprintf(stderr, "recon: %s\n", e.what());
        return 3;
    } catch (const rateadapt::RateInadmissibleError& e) {
        std::fprintf(stderr, "recon: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "recon: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "recon: %s\n", e.what());
        return 1;
    }
}
