#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace hilbench::detail {

// 64-bit FNV-1a. Stable across platforms and runs, which is what fixture
// keying (replay responses, scripted toolchain results) needs.
constexpr std::uint64_t fnv1a64(std::string_view data,
                                std::uint64_t seed = 0xcbf29ce484222325ull) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex16(std::uint64_t value);

// splitmix64 finalizer; mixes seeds for derived RNG streams.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    return mix64(seed ^ mix64(salt));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view salt) {
    return derive_seed(seed, fnv1a64(salt));
}

}  // namespace hilbench::detail
