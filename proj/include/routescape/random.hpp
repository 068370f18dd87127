#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace routescape {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-based seed derivation: the child seed depends only on the parent
/// seed and the counter, never on how many draws happened elsewhere. Walk w
/// uses derive_seed(base, w); step t of that walk simulates with
/// derive_seed(walk_seed, t).
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t counter) noexcept {
    return mix64(parent ^ mix64(counter + 0x632BE59BD9B4E019ULL));
}

/// Uniform integer in [0, bound). Rejection sampling on the raw engine output
/// so the sequence is identical across standard library implementations
/// (std::uniform_int_distribution is not).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
    // 2^64 mod bound; draws at or above 2^64 - rem would bias the low residues.
    const std::uint64_t rem = (std::numeric_limits<std::uint64_t>::max() % bound + 1) % bound;
    const std::uint64_t last_ok = std::numeric_limits<std::uint64_t>::max() - rem;
    for (;;) {
        const std::uint64_t x = rng();
        if (x <= last_ok) {
            return x % bound;
        }
    }
}

/// Uniform double in [0, 1) built from the top 53 bits.
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace routescape
