#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hcmab/core.hpp"
#include "hcmab/rng.hpp"

namespace hcmab {

/// Ordered list of arms (cascade) or a size-K multiset (single-trigger).
using Action = std::vector<ArmIndex>;

struct Observation {
    ArmIndex arm;
    double value;

    friend bool operator==(const Observation&, const Observation&) = default;
};

/// Triggered arms with their revealed outcomes, in reveal order.
using TriggerOutcome = std::vector<Observation>;

enum class EnvModel { Cascade, SingleTrigger };

const char* to_string(EnvModel model);
EnvModel env_model_from_string(const std::string& name);

struct EnvSpec {
    EnvModel model = EnvModel::Cascade;
    std::size_t arms = 0;
    std::size_t action_size = 0;  // k for cascade, K for single-trigger
    MeanVector mean;              // online means
    double reward_scale = 1.0;    // B for single-trigger

    void validate() const;
};

/// Independent Bernoulli(mu_i) outcome for every arm.
std::vector<std::uint8_t> sample_outcomes(RngStream& rng, const MeanVector& mu);

/// Common interface for the triggering models. Implementations are stateless;
/// randomness comes only from the streams passed in.
class Environment {
public:
    explicit Environment(EnvSpec spec);
    virtual ~Environment() = default;

    const EnvSpec& spec() const noexcept { return spec_; }
    EnvModel model() const noexcept { return spec_.model; }
    std::size_t arms() const noexcept { return spec_.arms; }
    std::size_t action_size() const noexcept { return spec_.action_size; }

    virtual void validate_action(std::span<const ArmIndex> action) const = 0;
    virtual double expected_reward(std::span<const ArmIndex> action, const MeanVector& mu) const = 0;
    virtual double trigger_prob(std::span<const ArmIndex> action, const MeanVector& mu,
                                ArmIndex arm) const = 0;

    /// Reveals outcomes for the triggered arms. The trigger stream is consumed
    /// the same way every round regardless of the action, so paired runs stay aligned.
    virtual TriggerOutcome trigger(std::span<const ArmIndex> action,
                                   std::span<const std::uint8_t> outcomes,
                                   RngStream& trigger_rng) const = 0;
    virtual double realized_reward(std::span<const ArmIndex> action,
                                   const TriggerOutcome& outcome) const = 0;

    virtual Action random_action(RngStream& rng) const = 0;

    /// Every action up to reward-equivalence (cascade: k-subsets in index order;
    /// single-trigger: nondecreasing K-multisets). Throws TooLarge past `cap`.
    virtual std::vector<Action> enumerate_actions(std::uint64_t cap) const = 0;
    virtual std::uint64_t action_count() const = 0;

    /// Number of distinct arms that can be triggered, max over actions.
    virtual std::size_t max_triggerable() const = 0;

private:
    EnvSpec spec_;
};

class CascadeEnvironment final : public Environment {
public:
    explicit CascadeEnvironment(EnvSpec spec);

    void validate_action(std::span<const ArmIndex> action) const override;
    double expected_reward(std::span<const ArmIndex> action, const MeanVector& mu) const override;
    double trigger_prob(std::span<const ArmIndex> action, const MeanVector& mu,
                        ArmIndex arm) const override;
    TriggerOutcome trigger(std::span<const ArmIndex> action, std::span<const std::uint8_t> outcomes,
                           RngStream& trigger_rng) const override;
    double realized_reward(std::span<const ArmIndex> action,
                           const TriggerOutcome& outcome) const override;
    Action random_action(RngStream& rng) const override;
    std::vector<Action> enumerate_actions(std::uint64_t cap) const override;
    std::uint64_t action_count() const override;
    std::size_t max_triggerable() const override { return action_size(); }
};

class SingleTriggerEnvironment final : public Environment {
public:
    explicit SingleTriggerEnvironment(EnvSpec spec);

    void validate_action(std::span<const ArmIndex> action) const override;
    double expected_reward(std::span<const ArmIndex> action, const MeanVector& mu) const override;
    double trigger_prob(std::span<const ArmIndex> action, const MeanVector& mu,
                        ArmIndex arm) const override;
    TriggerOutcome trigger(std::span<const ArmIndex> action, std::span<const std::uint8_t> outcomes,
                           RngStream& trigger_rng) const override;
    double realized_reward(std::span<const ArmIndex> action,
                           const TriggerOutcome& outcome) const override;
    Action random_action(RngStream& rng) const override;
    std::vector<Action> enumerate_actions(std::uint64_t cap) const override;
    std::uint64_t action_count() const override;
    std::size_t max_triggerable() const override;
};

std::unique_ptr<Environment> make_environment(const EnvSpec& spec);

// Free-function forms of the cascade model.

/// Scans `action` until the first success; earlier arms observed as 0, later
/// arms unobserved. With no success every arm is observed as 0.
TriggerOutcome cascade_trigger(std::span<const ArmIndex> action, std::span<const std::uint8_t> outcomes);

/// Click indicator: 1 if any revealed outcome is 1.
double cascade_reward_realized(const TriggerOutcome& outcome);

/// 1 - prod_{i in action} (1 - mu_i). Computed over the arms in index order, so
/// the value is bit-identical for every permutation of the action.
double cascade_reward_expected(std::span<const ArmIndex> action, const MeanVector& mu);

struct SingleTriggerStep {
    TriggerOutcome outcome;
    double reward;
};

/// One round of the single-trigger model: a uniformly chosen slot of `action`
/// is triggered and the reward is scale * its Bernoulli outcome.
SingleTriggerStep single_trigger_step(RngStream& rng, std::span<const ArmIndex> action,
                                      const MeanVector& mu, double reward_scale);

// Executable checks of the structural conditions.

struct ConditionReport {
    std::uint64_t trials = 0;
    std::uint64_t violations = 0;
    double worst = 0.0;  // largest violation (monotonicity) or largest ratio (TPM)
    bool passed() const noexcept { return violations == 0; }
};

/// Samples mu <= mu' coordinatewise and random actions; counts r_S(mu) > r_S(mu').
ConditionReport check_monotonicity(const Environment& env, std::uint64_t trials, RngStream& rng);

/// Samples (mu, mu', S); counts |r_S(mu) - r_S(mu')| > B * sum_i p_i^{mu,S} |mu_i - mu'_i|.
/// `worst` is the largest observed lhs/rhs ratio.
ConditionReport check_tpm(const Environment& env, double smoothness, std::uint64_t trials,
                          RngStream& rng);

using ActionPolicy = std::function<Action(RngStream&)>;

ActionPolicy uniform_random_policy(const Environment& env);

struct ArmIdentifiability {
    Count triggers = 0;
    double observed_mean = 0.0;
    double true_mean = 0.0;
    double standard_error = 0.0;
    bool inconclusive = false;
    bool within_tolerance = false;
};

struct IdentifiabilityReport {
    std::vector<ArmIdentifiability> arms;
    double tolerance_se = 4.0;
    // Inconclusive arms are reported but do not fail the check.
    bool passed() const;
};

/// Plays `policy` for `rounds` rounds and compares each arm's mean observed
/// outcome, conditional on being triggered, with its true mean.
IdentifiabilityReport check_identifiability(const Environment& env, const ActionPolicy& policy,
                                            std::uint64_t rounds, RngStream& rng,
                                            Count min_triggers = 100);

}  // namespace hcmab
