#include "forge/rng.hpp"

#include <limits>
#include <stdexcept>

namespace forge {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    return fmix64(state);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
}

std::uint64_t RandomStream::next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RandomStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RandomStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::int64_t RandomStream::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next_u64());  // full 64-bit range
    // Reject the low (2^64 mod span) values so every residue is equally likely.
    const std::uint64_t threshold = (0 - span) % span;
    for (;;) {
        const std::uint64_t x = next_u64();
        if (x >= threshold) return lo + static_cast<std::int64_t>(x % span);
    }
}

std::size_t RandomStream::index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("index: n must be positive");
    return static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(n - 1)));
}

bool RandomStream::bernoulli(double p) {
    if (p >= 1.0) {
        next_u64();
        return true;
    }
    return uniform() < p;
}

}  // namespace forge
