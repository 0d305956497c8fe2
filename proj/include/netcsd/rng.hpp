#pragma once

#include <cstdint>

namespace netcsd {

/// SplitMix64 counter generator feeding a Box-Muller transform. Both
/// algorithms are fixed here (not delegated to the standard library) so a
/// seed produces the same stream on every platform.
class NoiseRng {
public:
    explicit NoiseRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in (0, 1].
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; pairs are cached.
    double next_normal();

private:
    std::uint64_t state_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace netcsd
