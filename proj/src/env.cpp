#include "hcmab/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hcmab/errors.hpp"

namespace hcmab {

namespace {

// Tolerance for the float comparisons in the condition checks.
constexpr double kConditionSlack = 1e-12;

std::uint64_t binomial(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    // Saturates at cap + 1 so callers only learn "too large".
    unsigned __int128 result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
        if (result > cap) return cap + 1;
    }
    return static_cast<std::uint64_t>(result);
}

void check_indices(std::span<const ArmIndex> action, std::size_t arms) {
    for (ArmIndex a : action) {
        if (a >= arms) throw InvalidAction("arm index " + std::to_string(a) + " out of range");
    }
}

}  // namespace

const char* to_string(EnvModel model) {
    switch (model) {
        case EnvModel::Cascade: return "cascade";
        case EnvModel::SingleTrigger: return "single-trigger";
    }
    return "?";
}

EnvModel env_model_from_string(const std::string& name) {
    if (name == "cascade") return EnvModel::Cascade;
    if (name == "single-trigger") return EnvModel::SingleTrigger;
    throw ConfigError("unknown environment '" + name + "'");
}

void EnvSpec::validate() const {
    if (arms == 0) throw ShapeError("environment needs at least one arm");
    if (mean.size() != arms) throw ShapeError("mean vector length differs from arm count");
    if (action_size == 0) throw ShapeError("action size must be at least 1");
    if (model == EnvModel::Cascade && action_size > arms)
        throw ShapeError("cascade action size exceeds arm count");
    if (!(reward_scale > 0.0) || !std::isfinite(reward_scale))
        throw DomainError("reward scale must be positive");
}

std::vector<std::uint8_t> sample_outcomes(RngStream& rng, const MeanVector& mu) {
    std::vector<std::uint8_t> x(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) x[i] = rng.bernoulli(mu[i]) ? 1 : 0;
    return x;
}

Environment::Environment(EnvSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

// ---------------------------------------------------------------- cascade

TriggerOutcome cascade_trigger(std::span<const ArmIndex> action,
                               std::span<const std::uint8_t> outcomes) {
    TriggerOutcome tau;
    tau.reserve(action.size());
    for (std::size_t pos = 0; pos < action.size(); ++pos) {
        const ArmIndex a = action[pos];
        if (a >= outcomes.size()) throw InvalidAction("arm index out of range");
        for (std::size_t prev = 0; prev < pos; ++prev) {
            if (action[prev] == a) throw InvalidAction("cascade action repeats arm " + std::to_string(a));
        }
    }
    for (ArmIndex a : action) {
        const double x = outcomes[a] ? 1.0 : 0.0;
        tau.push_back({a, x});
        if (x == 1.0) break;
    }
    return tau;
}

double cascade_reward_realized(const TriggerOutcome& outcome) {
    for (const auto& obs : outcome) {
        if (obs.value == 1.0) return 1.0;
    }
    return 0.0;
}

double cascade_reward_expected(std::span<const ArmIndex> action, const MeanVector& mu) {
    Action sorted(action.begin(), action.end());
    std::sort(sorted.begin(), sorted.end());
    double miss = 1.0;
    for (ArmIndex a : sorted) miss *= 1.0 - mu.at(a);
    return 1.0 - miss;
}

CascadeEnvironment::CascadeEnvironment(EnvSpec spec) : Environment(std::move(spec)) {
    if (this->spec().model != EnvModel::Cascade) throw ConfigError("spec is not a cascade model");
}

void CascadeEnvironment::validate_action(std::span<const ArmIndex> action) const {
    if (action.size() != action_size())
        throw InvalidAction("cascade action must have exactly k arms");
    check_indices(action, arms());
    Action sorted(action.begin(), action.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw InvalidAction("cascade action contains a duplicate arm");
}

double CascadeEnvironment::expected_reward(std::span<const ArmIndex> action,
                                           const MeanVector& mu) const {
    return cascade_reward_expected(action, mu);
}

double CascadeEnvironment::trigger_prob(std::span<const ArmIndex> action, const MeanVector& mu,
                                        ArmIndex arm) const {
    double p = 1.0;
    for (ArmIndex a : action) {
        if (a == arm) return p;
        p *= 1.0 - mu.at(a);
    }
    return 0.0;
}

TriggerOutcome CascadeEnvironment::trigger(std::span<const ArmIndex> action,
                                           std::span<const std::uint8_t> outcomes,
                                           RngStream&) const {
    return cascade_trigger(action, outcomes);
}

double CascadeEnvironment::realized_reward(std::span<const ArmIndex>,
                                           const TriggerOutcome& outcome) const {
    return cascade_reward_realized(outcome);
}

Action CascadeEnvironment::random_action(RngStream& rng) const {
    // Partial Fisher-Yates.
    Action pool(arms());
    std::iota(pool.begin(), pool.end(), ArmIndex{0});
    for (std::size_t i = 0; i < action_size(); ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.index(arms() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(action_size());
    return pool;
}

std::uint64_t CascadeEnvironment::action_count() const {
    return binomial(arms(), action_size(), std::numeric_limits<std::uint64_t>::max() - 1);
}

std::vector<Action> CascadeEnvironment::enumerate_actions(std::uint64_t cap) const {
    const std::uint64_t count = binomial(arms(), action_size(), cap);
    if (count > cap) throw TooLarge("instance too large for exact opt: C(m,k) exceeds the enumeration cap");
    std::vector<Action> out;
    out.reserve(count);
    Action current(action_size());
    std::iota(current.begin(), current.end(), ArmIndex{0});
    const std::size_t m = arms(), k = action_size();
    for (;;) {
        out.push_back(current);
        std::size_t i = k;
        while (i > 0 && current[i - 1] == m - k + (i - 1)) --i;
        if (i == 0) break;
        ++current[i - 1];
        for (std::size_t j = i; j < k; ++j) current[j] = current[j - 1] + 1;
    }
    return out;
}

// --------------------------------------------------------- single-trigger

SingleTriggerEnvironment::SingleTriggerEnvironment(EnvSpec spec) : Environment(std::move(spec)) {
    if (this->spec().model != EnvModel::SingleTrigger)
        throw ConfigError("spec is not a single-trigger model");
}

void SingleTriggerEnvironment::validate_action(std::span<const ArmIndex> action) const {
    if (action.size() != action_size())
        throw InvalidAction("single-trigger action must have exactly K slots");
    check_indices(action, arms());
}

double SingleTriggerEnvironment::expected_reward(std::span<const ArmIndex> action,
                                                 const MeanVector& mu) const {
    Action sorted(action.begin(), action.end());
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (ArmIndex a : sorted) sum += mu.at(a);
    return spec().reward_scale * sum / static_cast<double>(action.size());
}

double SingleTriggerEnvironment::trigger_prob(std::span<const ArmIndex> action, const MeanVector&,
                                              ArmIndex arm) const {
    const auto copies = std::count(action.begin(), action.end(), arm);
    return static_cast<double>(copies) / static_cast<double>(action.size());
}

TriggerOutcome SingleTriggerEnvironment::trigger(std::span<const ArmIndex> action,
                                                 std::span<const std::uint8_t> outcomes,
                                                 RngStream& trigger_rng) const {
    const auto slot = static_cast<std::size_t>(trigger_rng.index(action.size()));
    const ArmIndex a = action[slot];
    if (a >= outcomes.size()) throw InvalidAction("arm index out of range");
    return {{a, outcomes[a] ? 1.0 : 0.0}};
}

double SingleTriggerEnvironment::realized_reward(std::span<const ArmIndex>,
                                                 const TriggerOutcome& outcome) const {
    double sum = 0.0;
    for (const auto& obs : outcome) sum += obs.value;
    return spec().reward_scale * sum;
}

Action SingleTriggerEnvironment::random_action(RngStream& rng) const {
    Action a(action_size());
    for (auto& slot : a) slot = static_cast<ArmIndex>(rng.index(arms()));
    return a;
}

std::uint64_t SingleTriggerEnvironment::action_count() const {
    return binomial(arms() + action_size() - 1, action_size(),
                    std::numeric_limits<std::uint64_t>::max() - 1);
}

std::vector<Action> SingleTriggerEnvironment::enumerate_actions(std::uint64_t cap) const {
    const std::uint64_t count = binomial(arms() + action_size() - 1, action_size(), cap);
    if (count > cap)
        throw TooLarge("instance too large for exact opt: multiset count exceeds the enumeration cap");
    std::vector<Action> out;
    out.reserve(count);
    const std::size_t m = arms(), k = action_size();
    Action current(k, 0);
    for (;;) {
        out.push_back(current);
        std::size_t i = k;
        while (i > 0 && current[i - 1] == m - 1) --i;
        if (i == 0) break;
        ++current[i - 1];
        for (std::size_t j = i; j < k; ++j) current[j] = current[i - 1];
    }
    return out;
}

std::size_t SingleTriggerEnvironment::max_triggerable() const {
    return std::min(arms(), action_size());
}

std::unique_ptr<Environment> make_environment(const EnvSpec& spec) {
    switch (spec.model) {
        case EnvModel::Cascade: return std::make_unique<CascadeEnvironment>(spec);
        case EnvModel::SingleTrigger: return std::make_unique<SingleTriggerEnvironment>(spec);
    }
    throw ConfigError("unknown environment model");
}

SingleTriggerStep single_trigger_step(RngStream& rng, std::span<const ArmIndex> action,
                                      const MeanVector& mu, double reward_scale) {
    if (action.empty()) throw InvalidAction("single-trigger action is empty");
    const auto x = sample_outcomes(rng, mu);
    const auto slot = static_cast<std::size_t>(rng.index(action.size()));
    const ArmIndex a = action[slot];
    if (a >= mu.size()) throw InvalidAction("arm index out of range");
    const double value = x[a] ? 1.0 : 0.0;
    return {{{a, value}}, reward_scale * value};
}

// ---------------------------------------------------------------- checks

namespace {

std::vector<double> random_means(std::size_t m, RngStream& rng) {
    std::vector<double> v(m);
    for (auto& x : v) x = rng.uniform01();
    return v;
}

}  // namespace

ConditionReport check_monotonicity(const Environment& env, std::uint64_t trials, RngStream& rng) {
    ConditionReport report;
    const std::size_t m = env.arms();
    for (std::uint64_t n = 0; n < trials; ++n) {
        auto lo = random_means(m, rng);
        std::vector<double> hi(m);
        for (std::size_t i = 0; i < m; ++i) hi[i] = lo[i] + rng.uniform01() * (1.0 - lo[i]);
        const MeanVector mu(std::move(lo)), mu_hi(std::move(hi));
        const Action s = env.random_action(rng);
        const double gap = env.expected_reward(s, mu) - env.expected_reward(s, mu_hi);
        ++report.trials;
        if (gap > kConditionSlack) ++report.violations;
        report.worst = std::max(report.worst, gap);
    }
    return report;
}

ConditionReport check_tpm(const Environment& env, double smoothness, std::uint64_t trials,
                          RngStream& rng) {
    if (!(smoothness > 0.0)) throw DomainError("TPM candidate constant must be positive");
    ConditionReport report;
    const std::size_t m = env.arms();
    for (std::uint64_t n = 0; n < trials; ++n) {
        const MeanVector mu(random_means(m, rng));
        const MeanVector mu2(random_means(m, rng));
        const Action s = env.random_action(rng);
        const double lhs = std::abs(env.expected_reward(s, mu) - env.expected_reward(s, mu2));
        double weighted = 0.0;
        for (ArmIndex i = 0; i < m; ++i) weighted += env.trigger_prob(s, mu, i) * std::abs(mu[i] - mu2[i]);
        const double rhs = smoothness * weighted;
        ++report.trials;
        if (lhs > rhs + kConditionSlack) ++report.violations;
        if (rhs > 0.0) report.worst = std::max(report.worst, lhs / rhs);
    }
    return report;
}

ActionPolicy uniform_random_policy(const Environment& env) {
    return [&env](RngStream& rng) { return env.random_action(rng); };
}

bool IdentifiabilityReport::passed() const {
    return std::all_of(arms.begin(), arms.end(),
                       [](const ArmIdentifiability& a) { return a.inconclusive || a.within_tolerance; });
}

IdentifiabilityReport check_identifiability(const Environment& env, const ActionPolicy& policy,
                                            std::uint64_t rounds, RngStream& rng,
                                            Count min_triggers) {
    const std::size_t m = env.arms();
    const MeanVector& mu = env.spec().mean;
    std::vector<Count> counts(m, 0);
    std::vector<double> sums(m, 0.0);
    for (std::uint64_t t = 0; t < rounds; ++t) {
        const Action s = policy(rng);
        const auto x = sample_outcomes(rng, mu);
        for (const auto& obs : env.trigger(s, x, rng)) {
            counts[obs.arm] += 1;
            sums[obs.arm] += obs.value;
        }
    }
    IdentifiabilityReport report;
    report.arms.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        auto& a = report.arms[i];
        a.triggers = counts[i];
        a.true_mean = mu[i];
        if (counts[i] < min_triggers) {
            a.inconclusive = true;
            continue;
        }
        const double n = static_cast<double>(counts[i]);
        a.observed_mean = sums[i] / n;
        a.standard_error = std::sqrt(mu[i] * (1.0 - mu[i]) / n);
        a.within_tolerance =
            std::abs(a.observed_mean - a.true_mean) <= report.tolerance_se * a.standard_error;
    }
    return report;
}

}  // namespace hcmab
