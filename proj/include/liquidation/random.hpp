#pragma once

// Deterministic per-path random streams. Every (seed, path, channel) triple
// gets its own engine, so strategies sharing a seed see the same shocks.

#include <cstdint>
#include <random>

namespace liquidation {

enum class Channel : std::uint64_t { Price = 1, Factor = 2, Arrival = 3, Adverse = 4 };

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t path, Channel ch) noexcept {
    return splitmix64(splitmix64(splitmix64(seed) ^ path) ^ static_cast<std::uint64_t>(ch));
}

class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t path, Channel ch) : eng_(stream_key(seed, path, ch)) {}

    /// +1 or -1 with equal probability.
    double sign() { return (eng_() >> 63) != 0 ? 1.0 : -1.0; }
    /// Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    bool bernoulli(double p) { return uniform() < p; }
    double gaussian() { return normal_(eng_); }

private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace liquidation
