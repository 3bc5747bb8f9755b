#pragma once

#include <array>
#include <cstdint>

namespace recon {

// splitmix64; used for seeding and for deriving independent stream seeds.
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

// Derives a well-mixed child seed for stream `stream` of a base seed.
inline uint64_t derive_seed(uint64_t base, uint64_t stream) {
    SplitMix64 sm(base ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    uint64_t s = sm.next();
    return s ^ sm.next();
}

// xoshiro256++ by Blackman & Vigna. Hand-rolled so that every seeded draw is
// reproducible across compilers and standard libraries.
struct Rng {
    std::array<uint64_t, 4> s;

    explicit Rng(uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s) w = sm.next();
    }

    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t next() {
        uint64_t result = rotl(s[0] + s[3], 23) + s[0];
        uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    // Uniform integer in [0, bound) without modulo bias (Lemire's method).
    uint64_t bounded(uint64_t bound) {
        if (bound < 2) return 0;
        uint64_t x = next();
        __uint128_t m = (__uint128_t)x * (__uint128_t)bound;
        uint64_t l = (uint64_t)m;
        if (l < bound) {
            uint64_t t = (0 - bound) % bound;
            while (l < t) {
                x = next();
                m = (__uint128_t)x * (__uint128_t)bound;
                l = (uint64_t)m;
            }
        }
        return (uint64_t)(m >> 64);
    }

    // Uniform double in [0, 1).
    double unit() { return (double)(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return unit() < p; }

    uint8_t bit() { return (uint8_t)(next() >> 63); }
};

}  // namespace recon
