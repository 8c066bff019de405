#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tempoflow {

/// splitmix64 mixer; used to derive independent, reproducible RNG streams
/// from a master seed plus logical stream coordinates.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
    return mix64(seed ^ (v + 0x9E3779B97F4A7C15ull + (seed << 6) + (seed >> 2)));
}

/// FNV-1a over a string tag, for purpose-scoped substreams.
inline std::uint64_t hash_tag(std::string_view tag) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char ch : tag) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001B3ull;
    }
    return h;
}

/// Engine for a named substream of a master seed, optionally indexed. Streams
/// with distinct tags/indices are statistically independent, and results never
/// depend on how work is split across threads.
inline std::mt19937_64 substream(std::uint64_t seed, std::string_view tag,
                                 std::uint64_t i0 = 0, std::uint64_t i1 = 0, std::uint64_t i2 = 0) {
    std::uint64_t h = hash_combine(seed, hash_tag(tag));
    h = hash_combine(h, i0);
    h = hash_combine(h, i1);
    h = hash_combine(h, i2);
    return std::mt19937_64(h);
}

} // namespace tempoflow
