// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace paf {

// Seeded RNG with hand-rolled value mappings. std::mt19937_64's output sequence
// is pinned by the standard, and mapping raw 64-bit words ourselves keeps the
// derived streams identical across standard library implementations
// (std::uniform_real_distribution is not portable bit-for-bit).
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return double(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n). Bias is O(n / 2^53) — negligible for the small
    // ranges used here, and fully deterministic.
    int uniform_int(int n) {
        int v = int(uniform01() * n);
        return v < n ? v : n - 1;
    }

    // Uniform integer in [lo, hi] inclusive.
    int uniform_between(int lo, int hi) { return lo + uniform_int(hi - lo + 1); }

private:
    std::mt19937_64 engine_;
};

// Derives an independent child seed from a base seed and an index
// (SplitMix64 finalizer — a standard, well-mixed 64-bit hash step).
inline uint64_t derive_seed(uint64_t base, uint64_t index) {
    uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace paf
