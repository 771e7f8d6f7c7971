#pragma once

#include <cstdint>
#include <random>

namespace hcmab {

// Purpose tags keep the per-replication streams disjoint. Values are part of the
// reproducibility contract: changing one changes every emitted result.
enum class StreamPurpose : std::uint64_t {
    Instance = 1,
    OfflineData = 2,
    Outcomes = 3,
    Trigger = 4,
    Policy = 5,
    Check = 6,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed derivation for (base seed, replication, purpose).
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t replication,
                          StreamPurpose purpose) noexcept;

/// Deterministic random stream. All sampling goes through integer draws and
/// exact comparisons so sequences are identical on every conforming platform.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}
    RngStream(std::uint64_t base_seed, std::uint64_t replication, StreamPurpose purpose)
        : RngStream(derive_seed(base_seed, replication, purpose)) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // 53 random bits.
    std::uint64_t next_u53() { return engine_() >> 11; }

    /// Uniform in [0, 1) with 2^-53 resolution.
    double uniform01();

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);

    /// Open interval (lo, hi); rejects the endpoint lo.
    double uniform_open(double lo, double hi);

    /// True with probability p, by comparing 53 uniform bits against p * 2^53.
    bool bernoulli(double p);

    /// Uniform index in [0, n), unbiased via rejection.
    std::uint64_t index(std::uint64_t n);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace hcmab
