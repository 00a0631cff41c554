#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace anchorlab {

// Deterministic RNG plumbing.  Every randomized routine takes an explicit
// seed and derives all of its draws from an mt19937_64 so that results are
// reproducible byte-for-byte across runs and platforms.

using Rng = std::mt19937_64;

// Stable seed mixing so independent work items (battery trials, see-saw
// restarts) get decorrelated streams that do not depend on scheduling order.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    // splitmix64 finalizer.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double gaussian(Rng& rng) {
    return std::normal_distribution<double>(0.0, 1.0)(rng);
}

// Flat Dirichlet draw via normalized exponentials; full support almost surely.
inline std::vector<double> dirichlet_flat(Rng& rng, std::size_t n) {
    std::exponential_distribution<double> exp1(1.0);
    std::vector<double> w(n);
    double total = 0.0;
    for (auto& v : w) {
        v = exp1(rng);
        if (v < 1e-300) v = 1e-300;
        total += v;
    }
    for (auto& v : w) v /= total;
    return w;
}

} // namespace anchorlab
