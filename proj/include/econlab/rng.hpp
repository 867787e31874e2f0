#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace econlab {

// SplitMix64 step, used to derive decorrelated seeds from (base, tag) pairs.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t tag) {
    std::uint64_t s = base ^ (tag * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull);
    return splitmix64(s);
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t tag_a, std::uint64_t tag_b) {
    return mix_seed(mix_seed(base, tag_a), tag_b);
}

// FNV-1a, for folding names (condition ids, config text) into seeds.
inline std::uint64_t hash_str(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

// Uniform double in [0, 1). std::uniform_real_distribution is
// implementation-defined; mt19937_64 output is not, so map it by hand.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

}  // namespace econlab
