#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace tsmotif {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Generator whose stream depends only on the seed and the key tuple,
/// never on the order in which streams are drawn. All randomness in the
/// library goes through this so that results are reproducible under any
/// parallel schedule.
inline std::mt19937_64 keyed_rng(uint64_t seed, std::initializer_list<uint64_t> keys) {
    uint64_t state = seed;
    uint64_t mixed = splitmix64(state);
    for (uint64_t key : keys) {
        state ^= key + 0x9e3779b97f4a7c15ULL + (mixed << 6) + (mixed >> 2);
        mixed = splitmix64(state);
    }
    return std::mt19937_64(mixed);
}

// Stream tags, one per consumer of randomness.
namespace rng_tag {
inline constexpr uint64_t width_direction = 1;
inline constexpr uint64_t width_sample = 2;
inline constexpr uint64_t pool_bank = 3;
inline constexpr uint64_t planted_walk = 4;
inline constexpr uint64_t planted_place = 5;
inline constexpr uint64_t planted_noise = 6;
inline constexpr uint64_t contrast_sample = 7;
}

} // namespace tsmotif
