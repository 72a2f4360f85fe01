#pragma once

#include <cstdint>
#include <random>

namespace busyq::rng {

/// 64-bit finalizer used to derive independent substream seeds
/// (splitmix64 mixing function).
std::uint64_t mix64(std::uint64_t z);

/// Seedable random stream with reproducible draws across platforms.
/// The engine is std::mt19937_64 (bit-exact by the standard); all variate
/// transforms are inverse-d.f. based, so identical seeds give identical
/// samples everywhere.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(mix64(seed ^ 0x6c62272e07bb0142ULL)) {}

    /// Replication r of a run seeded with `seed` draws from
    /// substream(seed, r); streams for distinct r are independent.
    static Stream substream(std::uint64_t seed, std::uint64_t index) {
        return Stream(mix64(seed + 0x9e3779b97f4a7c15ULL * (index + 1)));
    }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Exponential with the given rate, by inversion.
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace busyq::rng
