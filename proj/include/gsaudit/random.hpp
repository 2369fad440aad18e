#ifndef GSAUDIT_RANDOM_HPP
#define GSAUDIT_RANDOM_HPP

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

/**
 * @file random.hpp
 * @brief Seed derivation and platform-independent sampling primitives.
 *
 * Every stochastic routine draws from a `std::mt19937_64` seeded with a sub-seed derived from a master seed.
 * `std::mt19937_64` is fully specified by the standard, and the helpers below avoid the implementation-defined
 * `std::shuffle` and `std::uniform_int_distribution`, so streams are identical across standard libraries.
 */

namespace gsaudit {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/**
 * 64-bit FNV-1a over the bytes of `text`.
 */
inline constexpr std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t value) {
    return splitmix64(seed ^ splitmix64(value + 0x632be59bd9b4e019ULL));
}

/**
 * Sub-seed for replicate `index` of the stream named `tag` under `seed`.
 */
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0) {
    return mix_seed(mix_seed(seed, fnv1a(tag)), index);
}

/**
 * Uniform integer in `[0, n)` by rejection on the top of the 64-bit range.
 */
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return draw % n;
}

/**
 * Uniform real in `[0, 1)` from the top 53 bits.
 */
inline double uniform_real(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template<typename T>
void fisher_yates(std::vector<T>& values, Rng& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        auto j = uniform_index(rng, i);
        std::swap(values[i - 1], values[j]);
    }
}

/**
 * Moves a uniform random `k`-subset of `values` into the first `k` positions.
 */
template<typename T>
void partial_shuffle(std::vector<T>& values, std::size_t k, Rng& rng) {
    const std::size_t n = values.size();
    for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
        auto j = i + uniform_index(rng, n - i);
        std::swap(values[i], values[j]);
    }
}

}

#endif
