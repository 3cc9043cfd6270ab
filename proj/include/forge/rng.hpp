#pragma once

#include <concepts>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string_view>
#include <utility>

namespace forge {

// Portable random streams.
//
// Every stream is a xoshiro256** generator (Blackman & Vigna, 2018) whose
// 256-bit state is filled from four consecutive SplitMix64 outputs of a
// 64-bit stream seed. Stream seeds are derived from the master seed by
// folding a sequence of 64-bit keys:
//
//     s_0 = master
//     s_{i+1} = fmix64(s_i ^ fmix64(key_i + 0x9E3779B97F4A7C15))
//
// where fmix64 is the SplitMix64 output finalizer. Text keys are first
// reduced with 64-bit FNV-1a. Nothing here depends on <random>
// distributions, so sequences are identical across standard libraries.

constexpr std::uint64_t fmix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t key) {
    return fmix64(parent ^ fmix64(key + 0x9E3779B97F4A7C15ULL));
}

/// Key for one step of a derivation path; either a tag or an index.
struct StreamKey {
    std::uint64_t value;
    constexpr StreamKey(std::string_view tag) : value(fnv1a64(tag)) {}
    constexpr StreamKey(const char* tag) : value(fnv1a64(tag)) {}
    template <std::integral I>
    constexpr StreamKey(I index) : value(static_cast<std::uint64_t>(index)) {}
};

constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<StreamKey> path) {
    std::uint64_t s = master;
    for (const auto& k : path) s = derive_seed(s, k.value);
    return s;
}

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);
    RandomStream(std::uint64_t master, std::initializer_list<StreamKey> path)
        : RandomStream(derive_seed(master, path)) {}

    std::uint64_t next_u64();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi);
    /// Uniform integer in the closed range [lo, hi]; unbiased (rejection).
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    std::size_t index(std::size_t n);  // uniform in [0, n), n > 0
    bool bernoulli(double p);

    /// Fisher-Yates from the back: for i = n-1 .. 1, swap(i, uniform_int(0, i)).
    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i - 1)));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t s_[4];
};

}  // namespace forge
