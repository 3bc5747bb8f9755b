#include "recon/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "recon/digest.hpp"
#include "recon/metrics.hpp"
#include "recon/protocol.hpp"
#include "recon/rng.hpp"

namespace recon::harness {

using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "recon 1.0.0";

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

int log_level() {
    static int level = [] {
        const char* env = std::getenv("RECON_LOG");
        if (!env) return 0;
        std::string s(env);
        if (s == "debug") return 2;
        if (s == "info") return 1;
        return 0;
    }();
    return level;
}

template <typename T>
std::vector<T> list_of(const json& v, const char* key);

template <>
std::vector<double> list_of<double>(const json& v, const char* key) {
    std::vector<double> out;
    if (v.is_array())
        for (const auto& x : v) out.push_back(x.get<double>());
    else if (v.is_number())
        out.push_back(v.get<double>());
    else
        throw ConfigError(std::string("config key '") + key + "' must be a number or array");
    return out;
}

template <>
std::vector<int> list_of<int>(const json& v, const char* key) {
    std::vector<int> out;
    if (v.is_array())
        for (const auto& x : v) out.push_back(x.get<int>());
    else if (v.is_number())
        out.push_back(v.get<int>());
    else
        throw ConfigError(std::string("config key '") + key + "' must be a number or array");
    return out;
}

std::vector<std::string> string_list_of(const json& v, const char* key) {
    std::vector<std::string> out;
    if (v.is_array())
        for (const auto& x : v) out.push_back(x.get<std::string>());
    else if (v.is_string())
        out.push_back(v.get<std::string>());
    else
        throw ConfigError(std::string("config key '") + key + "' must be a string or array");
    return out;
}

}  // namespace

SweepConfig SweepConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& ex) {
        throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    SweepConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "schemes")
            cfg.schemes = string_list_of(value, "schemes");
        else if (key == "n")
            cfg.n_list = list_of<int>(value, "n");
        else if (key == "rates")
            cfg.rates = list_of<double>(value, "rates");
        else if (key == "snr_db")
            cfg.snr_db = list_of<double>(value, "snr_db");
        else if (key == "f_d")
            cfg.f_d_list = list_of<double>(value, "f_d");
        else if (key == "delta")
            cfg.delta_list = list_of<double>(value, "delta");
        else if (key == "trials")
            cfg.trials = value.get<int>();
        else if (key == "u_l")
            cfg.u_l = value.get<int>();
        else if (key == "master_seed")
            cfg.master_seed = value.get<uint64_t>();
        else if (key == "workers")
            cfg.workers = value.get<int>();
        else if (key == "N")
            cfg.N = value.get<int>();
        else if (key == "matrix_seed")
            cfg.matrix_seed = value.get<uint64_t>();
        else if (key == "out_dir")
            cfg.out_dir = value.get<std::string>();
        else if (key == "matrix_cache")
            cfg.matrix_cache = value.get<std::string>();
        else
            throw ConfigError("unknown config key '" + key + "'");
    }
    return cfg;
}

std::string SweepConfig::to_json() const {
    json j;
    j["schemes"] = schemes;
    j["n"] = n_list;
    j["rates"] = rates;
    j["snr_db"] = snr_db;
    j["f_d"] = f_d_list;
    j["delta"] = delta_list;
    j["trials"] = trials;
    j["u_l"] = u_l;
    j["master_seed"] = master_seed;
    j["workers"] = workers;
    j["N"] = N;
    j["matrix_seed"] = matrix_seed;
    j["out_dir"] = out_dir;
    j["matrix_cache"] = matrix_cache;
    return j.dump();
}

void SweepConfig::validate() const {
    if (schemes.empty()) throw ConfigError("schemes must be nonempty");
    for (const auto& s : schemes) protocol::scheme_from_string(s);  // throws on junk
    if (n_list.empty()) throw ConfigError("n must be nonempty");
    if (rates.empty()) throw ConfigError("rates must be nonempty");
    if (snr_db.empty()) throw ConfigError("snr_db must be nonempty");
    if (f_d_list.empty()) throw ConfigError("f_d must be nonempty");
    if (delta_list.empty()) throw ConfigError("delta must be nonempty");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (u_l < 1) throw ConfigError("u_l must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (N < 2) throw ConfigError("N must be >= 2 (used by MR/MRCR)");
}

KeyPair gen_key_pair(int n, double e, uint64_t seed) {
    if (e <= 0.0 || e >= 0.5) throw std::invalid_argument("gen_key_pair: e must be in (0, 0.5)");
    KeyPair kp;
    kp.x.resize((size_t)n);
    kp.y.resize((size_t)n);
    Rng rng(seed);
    for (int i = 0; i < n; ++i) kp.x[(size_t)i] = rng.bit();
    for (int i = 0; i < n; ++i) {
        uint8_t flip = rng.bernoulli(e) ? 1 : 0;
        kp.y[(size_t)i] = kp.x[(size_t)i] ^ flip;
        kp.flips += flip;
    }
    return kp;
}

const ldpc::MatrixSet& MatrixCache::get(int n, double rate, int count) {
    auto key = std::make_tuple(n, std::llround(rate * 1000000.0), count);
    auto it = mem_.find(key);
    if (it != mem_.end()) return it->second;

    if (!dir_.empty()) {
        std::filesystem::create_directories(dir_);
        std::vector<std::string> paths;
        bool all_exist = true;
        for (int k = 0; k < count; ++k) {
            std::ostringstream name;
            name << "n" << n << "_r" << std::llround(rate * 1000000.0) << "_N" << count << "_s"
                 << seed_ << "_k" << k << ".alist";
            paths.push_back((std::filesystem::path(dir_) / name.str()).string());
            if (!std::filesystem::exists(paths.back())) all_exist = false;
        }
        if (all_exist) {
            ldpc::MatrixSet set;
            set.seed = seed_;
            for (const auto& p : paths) {
                std::ifstream in(p);
                std::stringstream ss;
                ss << in.rdbuf();
                set.matrices.push_back(ldpc::from_alist(ss.str()));
            }
            auto [pos, inserted] = mem_.emplace(key, std::move(set));
            (void)inserted;
            return pos->second;
        }
        ldpc::MatrixSet set = ldpc::construct_set(n, rate, count, seed_);
        for (int k = 0; k < count; ++k) {
            std::ofstream out(paths[(size_t)k]);
            out << ldpc::to_alist(set.matrices[(size_t)k]);
        }
        auto [pos, inserted] = mem_.emplace(key, std::move(set));
        (void)inserted;
        return pos->second;
    }
    auto [pos, inserted] = mem_.emplace(key, ldpc::construct_set(n, rate, count, seed_));
    (void)inserted;
    return pos->second;
}

namespace {

struct CsvBuilder {
    std::string full;
    std::string canonical;

    void header(const std::vector<std::string>& cells, const std::vector<int>& excluded) {
        row_impl(cells, excluded);
    }
    void row(const std::vector<std::string>& cells, const std::vector<int>& excluded) {
        row_impl(cells, excluded);
    }

  private:
    void row_impl(const std::vector<std::string>& cells, const std::vector<int>& excluded) {
        for (size_t i = 0; i < cells.size(); ++i) {
            full += cells[i];
            if (i + 1 < cells.size()) full += ',';
        }
        full += '\n';
        bool first = true;
        for (size_t i = 0; i < cells.size(); ++i) {
            if (std::find(excluded.begin(), excluded.end(), (int)i) != excluded.end()) continue;
            if (!first) canonical += ',';
            canonical += cells[i];
            first = false;
        }
        canonical += '\n';
    }
};

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    SweepResult result;
    MatrixCache cache(cfg.matrix_cache, cfg.matrix_seed);

    long long total_points = (long long)cfg.schemes.size() * cfg.n_list.size() *
                             cfg.snr_db.size() * cfg.f_d_list.size() * cfg.delta_list.size();
    long long point_index = -1;
    for (const auto& scheme_name : cfg.schemes) {
        protocol::Scheme scheme = protocol::scheme_from_string(scheme_name);
        int use_N = protocol::is_multi_matrix(scheme) ? cfg.N : 1;
        for (int n : cfg.n_list)
            for (double snr : cfg.snr_db)
                for (double f_d : cfg.f_d_list)
                    for (double delta : cfg.delta_list) {
                        ++point_index;
                        double e = metrics::snr_to_ber(snr);
                        PointAggregate agg;
                        agg.scheme = scheme_name;
                        agg.n = n;
                        agg.snr_db = snr;
                        agg.e = e;
                        agg.f_d = f_d;
                        agg.delta = delta;
                        double rate = 0.0;
                        try {
                            rate = protocol::choose_rate(e, f_d, cfg.rates);
                        } catch (const rateadapt::RateInadmissibleError& ex) {
                            agg.skipped = true;
                            agg.skip_reason = ex.what();
                            result.points.push_back(std::move(agg));
                            continue;
                        }
                        agg.rate = rate;
                        const ldpc::MatrixSet& set = cache.get(n, rate, use_N);

                        protocol::SessionConfig point_cfg;
                        point_cfg.scheme = scheme;
                        point_cfg.N = use_N;
                        point_cfg.f_d = f_d;
                        point_cfg.delta = delta;
                        point_cfg.U_L = cfg.u_l;
                        point_cfg.rate_table = {{rate, &set}};

                        std::vector<TrialRecord> records((size_t)cfg.trials);
                        std::vector<char> mismatch((size_t)cfg.trials, 0);
                        uint64_t point_seed = derive_seed(cfg.master_seed, 0x9000 + (uint64_t)point_index);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(cfg.workers) if (cfg.workers > 1)
#endif
                        for (int trial = 0; trial < cfg.trials; ++trial) {
                            uint64_t base = derive_seed(point_seed, (uint64_t)trial);
                            KeyPair kp = gen_key_pair(n, e, derive_seed(base, 0));
                            protocol::SessionConfig acfg = point_cfg;
                            acfg.shared_seed = derive_seed(base, 1);
                            acfg.local_seed = derive_seed(base, 2);
                            protocol::SessionConfig bcfg = acfg;
                            bcfg.local_seed = derive_seed(base, 3);
                            auto t0 = std::chrono::steady_clock::now();
                            auto [ra, rb] = protocol::run_session(kp.x, kp.y, e, acfg, bcfg);
                            auto t1 = std::chrono::steady_clock::now();
                            TrialRecord rec;
                            rec.scheme = scheme_name;
                            rec.n = n;
                            rec.rate = rate;
                            rec.snr_db = snr;
                            rec.e = e;
                            rec.f_d = f_d;
                            rec.delta = delta;
                            rec.trial = trial;
                            rec.success = ra.success && rb.success;
                            rec.rounds = rb.rounds;
                            rec.iterations = rb.iterations_total;
                            rec.s_final = rb.s_final;
                            rec.f = rb.success ? rb.f : 0.0;
                            rec.p0 = rb.p0;
                            rec.wall_s = std::chrono::duration<double>(t1 - t0).count();
                            if (rec.success && ra.key != rb.key) mismatch[(size_t)trial] = 1;
                            records[(size_t)trial] = std::move(rec);
                        }
                        agg.trials = cfg.trials;
                        double busy = 0.0, f_sum = 0.0;
                        for (const auto& rec : records) {
                            busy += rec.wall_s;
                            if (rec.success) {
                                ++agg.successes;
                                f_sum += rec.f;
                            }
                            agg.p0 = rec.p0;
                        }
                        for (char mm : mismatch) result.undetected_mismatches += mm;
                        agg.fer = 1.0 - (double)agg.successes / (double)cfg.trials;
                        agg.mean_f = agg.successes ? f_sum / (double)agg.successes : 0.0;
                        agg.busy_s = busy / (double)cfg.workers;
                        double t = agg.busy_s > 0.0 ? agg.busy_s : 1e-9;
                        agg.throughput_bps = metrics::throughput(agg.successes, n, agg.p0, t);
                        for (auto& rec : records) result.trials.push_back(std::move(rec));
                        result.points.push_back(std::move(agg));
                        if (log_level() >= 1)
                            std::fprintf(stderr,
                                         "sweep: point %lld/%lld %s n=%d snr=%.3f fd=%.3f delta=%.3f "
                                         "successes=%d/%d mean_f=%.4f\n",
                                         point_index + 1, total_points, scheme_name.c_str(), n, snr,
                                         f_d, delta, result.points.back().successes, cfg.trials,
                                         result.points.back().mean_f);
                    }
    }

    // CSV renderings; the canonical variant drops wall-time-derived columns
    CsvBuilder trials_csv;
    const std::vector<int> trial_excl{14};  // wall_s
    trials_csv.header({"scheme", "n", "rate", "snr_db", "e", "f_d", "delta", "trial", "success",
                       "rounds", "iterations", "s_final", "f", "p0", "wall_s"},
                      trial_excl);
    for (const auto& r : result.trials)
        trials_csv.row({r.scheme, std::to_string(r.n), fmt_double(r.rate), fmt_double(r.snr_db),
                        fmt_double(r.e), fmt_double(r.f_d), fmt_double(r.delta),
                        std::to_string(r.trial), r.success ? "1" : "0", std::to_string(r.rounds),
                        std::to_string(r.iterations), std::to_string(r.s_final),
                        r.success ? fmt_double(r.f) : "", std::to_string(r.p0),
                        fmt_double(r.wall_s)},
                       trial_excl);

    CsvBuilder points_csv;
    const std::vector<int> point_excl{12, 13};  // busy_s, throughput_bps
    points_csv.header({"scheme", "n", "rate", "snr_db", "e", "f_d", "delta", "trials", "successes",
                       "fer", "mean_f", "p0", "busy_s", "throughput_bps", "skipped", "skip_reason"},
                      point_excl);
    for (const auto& p : result.points)
        points_csv.row({p.scheme, std::to_string(p.n), fmt_double(p.rate), fmt_double(p.snr_db),
                        fmt_double(p.e), fmt_double(p.f_d), fmt_double(p.delta),
                        std::to_string(p.trials), std::to_string(p.successes), fmt_double(p.fer),
                        fmt_double(p.mean_f), std::to_string(p.p0), fmt_double(p.busy_s),
                        fmt_double(p.throughput_bps), p.skipped ? "1" : "0", p.skip_reason},
                       point_excl);

    result.trials_csv = trials_csv.full;
    result.points_csv = points_csv.full;
    Fnv1a64 digest;
    digest.update(trials_csv.canonical);
    digest.update("\n");
    digest.update(points_csv.canonical);
    result.digest = digest.hex();

    json summary;
    summary["version"] = kVersion;
    summary["config"] = json::parse(cfg.to_json());
    summary["digest"] = result.digest;
    summary["undetected_mismatches"] = result.undetected_mismatches;
    json jpoints = json::array();
    for (const auto& p : result.points) {
        json jp;
        jp["scheme"] = p.scheme;
        jp["n"] = p.n;
        jp["rate"] = p.rate;
        jp["snr_db"] = p.snr_db;
        jp["e"] = p.e;
        jp["f_d"] = p.f_d;
        jp["delta"] = p.delta;
        jp["trials"] = p.trials;
        jp["successes"] = p.successes;
        jp["fer"] = p.fer;
        jp["mean_f"] = p.mean_f;
        jp["p0"] = p.p0;
        jp["busy_s"] = p.busy_s;
        jp["throughput_bps"] = p.throughput_bps;
        jp["skipped"] = p.skipped;
        if (p.skipped) jp["skip_reason"] = p.skip_reason;
        jpoints.push_back(std::move(jp));
    }
    summary["points"] = std::move(jpoints);
    result.summary_json = summary.dump(2);
    return result;
}

void write_sweep_outputs(const SweepConfig& cfg, const SweepResult& result) {
    if (cfg.out_dir.empty()) throw ConfigError("out_dir is empty");
    std::filesystem::create_directories(cfg.out_dir);
    auto write = [&](const char* name, const std::string& content) {
        std::ofstream out(std::filesystem::path(cfg.out_dir) / name);
        if (!out) throw std::runtime_error(std::string("cannot write output file ") + name);
        out << content;
    };
    write("trials.csv", result.trials_csv);
    write("points.csv", result.points_csv);
    write("summary.json", result.summary_json);
}

}  // namespace recon::harness
