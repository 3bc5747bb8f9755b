// Decoder sweep-kernel benchmark: serial vs OpenMP vs the dense reference
// decoder, with a bitwise cross-check between the two production paths.
// Not a test; run manually. Optional args: n rate N iters [threads].

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "recon/decoder.hpp"
#include "recon/digest.hpp"
#include "recon/harness.hpp"
#include "recon/ldpc.hpp"
#include "recon/reference_decoder.hpp"

using namespace recon;

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string word_digest(const std::vector<uint8_t>& w) {
    return fnv1a64_hex(w.data(), w.size());
}

}  // namespace

int main(int argc, char** argv) {
    int n = argc > 1 ? std::atoi(argv[1]) : 10000;
    double rate = argc > 2 ? std::atof(argv[2]) : 0.6;
    int count = argc > 3 ? std::atoi(argv[3]) : 3;
    int iters = argc > 4 ? std::atoi(argv[4]) : 50;
#ifdef _OPENMP
    if (argc > 5) omp_set_num_threads(std::atoi(argv[5]));
    int threads = omp_get_max_threads();
#else
    int threads = 1;
#endif
    const double e = 0.03;

    double t0 = now_s();
    auto set = ldpc::construct_set(n, rate, count, 1);
    std::printf("construct      n=%d rate=%.2f N=%d: %.2f s\n", n, rate, count, now_s() - t0);

    auto kp = harness::gen_key_pair(n, e, 42);
    std::vector<ldpc::Syndrome> syndromes;
    for (const auto& H : set.matrices) syndromes.push_back(ldpc::syndrome(H, kp.x));

    long long edges = 0;
    for (const auto& H : set.matrices)
        for (const auto& row : H.row_adj) edges += (long long)row.size();

    auto plan = rateadapt::PuncturePlan::from_order({});
    decoder::DecoderConfig cfg;
    cfg.e = e;

    auto bench = [&](bool parallel) {
        cfg.parallel = parallel;
        auto st = decoder::init(kp.y, plan, cfg, set);
        double t = now_s();
        for (int i = 0; i < iters; ++i) decoder::iterate(st, set, syndromes);
        double dt = now_s() - t;
        std::printf("%-14s %d iters: %7.3f s  (%6.1f Medge-updates/s)\n",
                    parallel ? "parallel" : "serial", iters,
                    dt, (double)edges * iters / dt / 1e6);
        return st;
    };

    auto st_serial = bench(false);
#ifdef _OPENMP
    std::printf("threads        %d\n", threads);
    auto st_parallel = bench(true);
#else
    (void)threads;
    auto st_parallel = bench(false);
#endif

    {  // dense reference, single matrix (its natural scope)
        refdec::RefDecoder ref;
        ref.init(set.matrices.front(), kp.y, e, {}, {});
        double t = now_s();
        for (int i = 0; i < iters; ++i) ref.iterate(syndromes.front());
        double dt = now_s() - t;
        long long ref_edges = edges / count;
        std::printf("%-14s %d iters: %7.3f s  (%6.1f Medge-updates/s, 1 matrix)\n", "reference",
                    iters, dt, (double)ref_edges * iters / dt / 1e6);
    }

    bool same = st_serial.word == st_parallel.word;
    std::printf("word digest    serial %s  parallel %s  -> %s\n",
                word_digest(st_serial.word).c_str(), word_digest(st_parallel.word).c_str(),
                same ? "identical" : "MISMATCH");
    return same ? 0 : 1;
}
