#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace caer {

// FNV-1a, 64-bit. Used wherever a stable cross-platform hash is needed
// (std::hash is implementation-defined and unfit for reproducible runs).
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::string_view s,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
    return fnv1a64(s.data(), s.size(), seed);
}

// Keeps string literals off the raw-memory overload, where the seed would be
// misread as a byte count.
inline std::uint64_t fnv1a64(const char* s, std::uint64_t seed = 0xcbf29ce484222325ull) {
    return fnv1a64(std::string_view(s), seed);
}

// Uniform draw in [0, bound) via rejection sampling. Unlike
// std::uniform_int_distribution the output is fully pinned by the standard's
// mt19937_64 sequence, so shuffles reproduce across compilers.
inline std::uint64_t bounded_rand(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t threshold = -bound % bound;
    for (;;) {
        std::uint64_t r = rng();
        if (r >= threshold) return r % bound;
    }
}

// Fisher-Yates with bounded_rand; the one permutation algorithm used for
// sampling and random-mode retrieval.
template <typename T>
void deterministic_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(bounded_rand(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
bool starts_with_ci(std::string_view s, std::string_view prefix);

std::string base64_encode(const std::uint8_t* data, std::size_t len);
std::string base64_encode(const std::vector<std::uint8_t>& data);

}  // namespace caer
