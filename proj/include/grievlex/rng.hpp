#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace grievlex {

// Deterministic randomness utilities.
//
// Everything derived from a (seed, index) pair below is a stability
// contract: reports must reproduce bit-identically across platforms,
// thread counts, and reruns. std::uniform_int_distribution and
// std::shuffle are avoided on purpose — their outputs are not pinned by
// the standard.

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Engine seed for substream `index` of run seed `seed`.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index * 0xD1B54A32D192ED03ULL + 1));
}

inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(substream_seed(seed, index));
}

// Unbiased draw in [0, n) by rejection on raw 64-bit words.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

// First k cells of a Fisher–Yates pass over [0, n): a uniform k-subset
// of indices, in draw order.
inline std::vector<std::size_t> sample_without_replacement(std::mt19937_64& rng,
                                                           std::size_t n,
                                                           std::size_t k) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t j = 0; j < k && j + 1 < n; ++j) {
        const std::size_t r = j + static_cast<std::size_t>(uniform_below(rng, n - j));
        std::swap(idx[j], idx[r]);
    }
    idx.resize(k);
    return idx;
}

template <typename T>
void shuffle_inplace(std::mt19937_64& rng, std::vector<T>& v) {
    for (std::size_t j = v.size(); j > 1; --j) {
        std::swap(v[j - 1], v[static_cast<std::size_t>(uniform_below(rng, j))]);
    }
}

} // namespace grievlex
