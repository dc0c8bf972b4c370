#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace qpr {

// splitmix64 finalizer, used for seed mixing and domain separation.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline uint64_t hash_tag(const char* s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (; *s; ++s) h = (h ^ uint64_t(uint8_t(*s))) * 0x100000001b3ull;
    return h;
}

// Seeded random stream. Derivation is a pure function of (base seed, tag),
// so parallel shards and subcommands own disjoint, reproducible streams.
class RngStream {
public:
    explicit RngStream(uint64_t seed) : seed_(seed), eng_(mix64(seed)) {}

    RngStream derive(uint64_t tag) const { return RngStream(mix64(seed_ ^ mix64(tag))); }
    RngStream derive(const char* tag) const { return derive(hash_tag(tag)); }

    uint64_t bits() { return eng_(); }

    int bit() { return int(bits() >> 63); }

    // uniform in [0, 1)
    double uniform() { return double(bits() >> 11) * 0x1.0p-53; }

    // unbiased uniform integer in [0, bound)
    uint64_t below(uint64_t bound) {
        uint64_t mask = ~0ull;
        if (bound > 1) {
            int lz = __builtin_clzll(bound - 1);
            mask >>= lz;
        } else {
            return 0;
        }
        uint64_t v;
        do {
            v = bits() & mask;
        } while (v >= bound);
        return v;
    }

    // standard normal via Box-Muller (self-contained: std::normal_distribution
    // is not bit-stable across library implementations)
    double gauss() {
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    std::complex<double> cgauss() { return {gauss(), gauss()}; }

    uint64_t base_seed() const { return seed_; }

private:
    uint64_t seed_;
    std::mt19937_64 eng_;
};

} // namespace qpr
