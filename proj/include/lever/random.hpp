#pragma once

#include <cstdint>
#include <random>

namespace lever {

using Seed = std::uint64_t;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Per-trial / per-purpose seed derivation: hash(base_seed, index). Independent
/// of execution order, so parallel trials see the same streams as serial ones.
Seed derive_seed(Seed base, std::uint64_t index) noexcept;

/// Seeded random stream. Uniform draws are built from raw 64-bit output so they
/// do not depend on the standard library's distribution implementation.
class RandomStream {
public:
    explicit RandomStream(Seed seed) : engine_(splitmix64(seed)) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

    double normal() { return normal_(engine_); }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

// Purpose tags mixed into derived seeds.
inline constexpr std::uint64_t kScoreNoiseStream = 0x6e6f697365ULL;
inline constexpr std::uint64_t kSketchStream = 0x736b657463ULL;
inline constexpr std::uint64_t kInstanceStream = 0x696e7374ULL;
inline constexpr std::uint64_t kTrialStream = 0x747269616cULL;

} // namespace lever
