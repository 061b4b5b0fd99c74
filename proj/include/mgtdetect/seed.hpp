#pragma once

#include <cstdint>
#include <string_view>

namespace mgtdetect {

// All randomness fans out from one base seed: stage seed = splitmix64(base ^ fnv1a64(stage)).
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view stage) {
    return splitmix64(base ^ fnv1a64(stage));
}

}  // namespace mgtdetect
