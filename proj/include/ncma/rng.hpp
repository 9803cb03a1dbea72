#pragma once

#include <cstdint>
#include <random>

namespace ncma {

// splitmix64 finalizer; good enough bit mixing for seed derivation.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derive a child seed from a master seed and up to three stream indices.
// Each distinct index tuple gets an independent stream; the mapping is pure
// so replays are reproducible regardless of scheduling order.
inline uint64_t mix_seed(uint64_t master, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    uint64_t h = splitmix64(master ^ 0x5851f42d4c957f2dULL);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ (b + 0x9e3779b97f4a7c15ULL));
    h = splitmix64(h ^ (c + 0xd1b54a32d192ed03ULL));
    return h;
}

inline std::mt19937_64 make_rng(uint64_t seed) { return std::mt19937_64(splitmix64(seed)); }

}  // namespace ncma
