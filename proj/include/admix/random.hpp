#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

namespace admix {

/// All randomness in the library flows through explicitly seeded engines of
/// this type. The distribution helpers below map raw engine output to values
/// with fixed arithmetic so results do not depend on the standard library's
/// distribution implementations.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double unit_interval(Rng &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_real(Rng &rng, double lo, double hi) {
    return lo + (hi - lo) * unit_interval(rng);
}

/// Uniform integer in [0, bound) by rejection; bound must be positive.
inline std::uint64_t uniform_index(Rng &rng, std::uint64_t bound) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - (max % bound + 1) % bound;
    std::uint64_t draw = rng();
    while (draw > limit) {
        draw = rng();
    }
    return draw % bound;
}

inline bool bernoulli(Rng &rng, double probability) {
    if (probability <= 0.0) {
        return false;
    }
    if (probability >= 1.0) {
        return true;
    }
    return unit_interval(rng) < probability;
}

template <class T> void shuffle(std::vector<T> &items, Rng &rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

/// k distinct values from {0..n-1}, returned ascending (partial
/// Fisher-Yates).
inline std::vector<std::size_t> sample_subset(Rng &rng, std::size_t n,
                                              std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) {
        pool[i] = i;
    }
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_index(rng, n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a, used to fold string tags into seed derivations.
constexpr std::uint64_t hash_string(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace detail {
constexpr std::uint64_t seed_part(std::uint64_t v) noexcept { return v; }
constexpr std::uint64_t seed_part(std::string_view v) noexcept {
    return hash_string(v);
}
} // namespace detail

/// Stable 64-bit seed from an ordered tuple of integers and strings.
/// Order matters: derive_seed(a, b) != derive_seed(b, a) in general.
template <class... Parts>
constexpr std::uint64_t derive_seed(std::uint64_t root, const Parts &...parts) {
    std::uint64_t h = splitmix64(root);
    ((h = splitmix64(h ^ splitmix64(detail::seed_part(parts) +
                                     0x632be59bd9b4e019ULL))),
     ...);
    return h;
}

} // namespace admix
