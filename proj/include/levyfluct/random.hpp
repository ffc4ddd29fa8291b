#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace levyfluct {

/// SplitMix64 finalizer; used to derive independent stream keys.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ keyed by (master seed, stream index). Streams for distinct
/// indices are statistically independent, so replication i draws the same
/// numbers no matter which thread runs it.
class StreamRng {
public:
    using result_type = std::uint64_t;

    StreamRng(std::uint64_t master_seed, std::uint64_t stream) noexcept {
        std::uint64_t key = master_seed;
        const std::uint64_t a = splitmix64(key);
        std::uint64_t mixed = a ^ (stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
        for (auto& word : s_) word = splitmix64(mixed);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on (0, 1).
    double uniform() noexcept { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    double exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

    double normal() { return normal_(*this); }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4]{};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace levyfluct
