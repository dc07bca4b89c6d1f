#pragma once

#include <cstdint>

namespace chemostat {

// SplitMix64 generator. A single 64-bit seed expands into independent
// per-task streams through a counter offset, so ensembles produce the same
// numbers no matter how work is scheduled across threads.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

    static constexpr SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
        return SplitMix64(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
    }

    constexpr std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform double in [0, 1)
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
    std::uint64_t state_;
};

}  // namespace chemostat
