#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace hcmab {

using ArmIndex = std::size_t;
using Count = std::uint64_t;

// Absolute slack allowed when comparing |mu_off - mu_on| against V. Instances
// built as mu_on + V land a rounding step away from the exact boundary.
inline constexpr double kBiasTolerance = 1e-12;

/// Per-arm means in [0,1]. Validated on construction and immutable afterwards.
class MeanVector {
public:
    MeanVector() = default;
    explicit MeanVector(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](ArmIndex i) const { return values_[i]; }
    double at(ArmIndex i) const;
    std::span<const double> values() const noexcept { return values_; }

    friend bool operator==(const MeanVector&, const MeanVector&) = default;

private:
    std::vector<double> values_;
};

/// Per-arm bias bounds V_i in [0,1].
class BiasVector {
public:
    BiasVector() = default;
    explicit BiasVector(std::vector<double> values);
    static BiasVector uniform(std::size_t arms, double v);

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](ArmIndex i) const { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

    friend bool operator==(const BiasVector&, const BiasVector&) = default;

private:
    std::vector<double> values_;
};

/// Warm-start data: per-arm sample lists drawn from the offline distribution.
class OfflineDataset {
public:
    OfflineDataset() = default;
    explicit OfflineDataset(std::vector<std::vector<double>> samples);
    static OfflineDataset empty(std::size_t arms);

    std::size_t arms() const noexcept { return samples_.size(); }
    Count count(ArmIndex i) const { return samples_.at(i).size(); }
    std::span<const double> samples(ArmIndex i) const { return samples_.at(i); }
    /// Empirical mean, or nullopt when the arm has no samples.
    std::optional<double> mean(ArmIndex i) const { return means_.at(i); }

    friend bool operator==(const OfflineDataset& a, const OfflineDataset& b) {
        return a.samples_ == b.samples_;
    }

private:
    std::vector<std::vector<double>> samples_;
    std::vector<std::optional<double>> means_;
};

/// Running statistics for one arm inside an episode.
struct ArmState {
    Count trigger_count = 0;
    double online_mean = 0.0;
    // Kept alongside the incremental mean so the two can be cross-checked.
    double online_sum = 0.0;
    Count offline_count = 0;
    std::optional<double> offline_mean;
    double bias_bound = 0.0;
};

/// Records one online observation x in [0,1].
void update_online_mean(ArmState& state, double x);

/// delta_t = 1 / (2 m t^2).
double confidence_delta(std::uint64_t t, std::size_t arms);

/// log(4 m t^3) = log(2t / delta_t), natural log.
double confidence_log_term(std::uint64_t t, std::size_t arms);

/// omega_i = V_i + mu_off - mu_on, in [0, 2 V_i]. Throws BiasViolation when
/// |mu_off - mu_on| > V_i.
double omega(double bias_bound, double mu_off, double mu_on, ArmIndex arm = 0);

/// Arms with |mu_off_i - mu_on_i| > V_i. Empty iff the bias constraint holds.
std::vector<ArmIndex> validate_bias(const MeanVector& mu_off, const MeanVector& mu_on,
                                    const BiasVector& v);

/// Initial per-arm state from offline data and bias bounds.
std::vector<ArmState> initial_arm_states(const OfflineDataset& data, const BiasVector& v);

}  // namespace hcmab
