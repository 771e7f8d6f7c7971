#include "hcmab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "hcmab/errors.hpp"

namespace hcmab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double horizon_log_term(std::size_t arms, std::uint64_t horizon) {
    if (horizon == 0) throw DomainError("horizon T must be at least 1");
    return confidence_log_term(horizon, arms);
}

double additive_terms(const TheoryInstance& inst) {
    return 4.0 * inst.smoothness * static_cast<double>(inst.arms) +
           std::numbers::pi * std::numbers::pi / 6.0 * inst.gaps.max_gap;
}

double squared_clamp(double factor) {
    const double f = std::max(factor, 0.0);
    return f * f;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_and_se(const std::vector<double>& xs) {
    MeanSe out;
    const double n = static_cast<double>(xs.size());
    if (xs.empty()) return out;
    out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (xs.size() < 2) return out;
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    return out;
}

DecompositionReport summarize_decomposition(const std::vector<double>& gaps,
                                            const std::vector<std::vector<double>>& regret,
                                            const std::vector<std::vector<double>>& scaled,
                                            std::uint64_t replications) {
    DecompositionReport report;
    report.replications = replications;
    report.arms.resize(gaps.size());
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        auto& a = report.arms[i];
        a.gap = gaps[i];
        std::vector<double> diff(replications);
        for (std::size_t r = 0; r < replications; ++r) diff[r] = regret[i][r] - scaled[i][r];
        a.mean_regret = mean_and_se(regret[i]).mean;
        a.mean_scaled_triggers = mean_and_se(scaled[i]).mean;
        const MeanSe d = mean_and_se(diff);
        a.difference_se = d.se;
        const double slack = 1e-9 * std::max(1.0, std::abs(a.mean_regret));
        a.within_tolerance = std::abs(d.mean) <= report.tolerance_se * d.se + slack;
    }
    return report;
}

std::vector<double> base_gaps(const Environment& env) {
    const auto& mu = env.spec().mean;
    const double best = *std::max_element(mu.values().begin(), mu.values().end());
    std::vector<double> gaps(env.arms());
    for (std::size_t i = 0; i < gaps.size(); ++i) gaps[i] = best - mu[i];
    return gaps;
}

void require_single_trigger(const Environment& env) {
    if (env.model() != EnvModel::SingleTrigger)
        throw ConfigError("decomposition check needs a single-trigger environment");
}

}  // namespace

GapProfile compute_gaps(const Environment& env, const MeanVector& mu, double alpha,
                        std::uint64_t cap) {
    if (mu.size() != env.arms()) throw ShapeError("mean vector length differs from arm count");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0,1]");
    const auto actions = env.enumerate_actions(cap);
    GapProfile g;
    g.arm_min_gap.assign(env.arms(), kInf);
    g.arm_max_gap.assign(env.arms(), 0.0);
    g.opt = compute_opt(env, mu, cap).opt;
    g.action_gaps.reserve(actions.size());
    for (const auto& a : actions) {
        const double gap = std::max(0.0, alpha * g.opt - env.expected_reward(a, mu));
        g.action_gaps.emplace_back(a, gap);
        if (!(gap > 0.0)) continue;
        for (ArmIndex i : a) {
            g.arm_min_gap[i] = std::min(g.arm_min_gap[i], gap);
            g.arm_max_gap[i] = std::max(g.arm_max_gap[i], gap);
        }
    }
    g.min_gap = *std::min_element(g.arm_min_gap.begin(), g.arm_min_gap.end());
    g.max_gap = *std::max_element(g.arm_max_gap.begin(), g.arm_max_gap.end());
    return g;
}

void TheoryInstance::validate() const {
    if (arms == 0) throw ShapeError("theory instance needs at least one arm");
    if (max_triggered == 0) throw ShapeError("K must be at least 1");
    if (!(smoothness > 0.0)) throw DomainError("B must be positive");
    if (horizon == 0) throw DomainError("horizon T must be at least 1");
    if (offline_counts.size() != arms || omegas.size() != arms || bias_bounds.size() != arms ||
        gaps.arm_min_gap.size() != arms)
        throw ShapeError("theory instance per-arm vectors must have length m");
    for (std::size_t i = 0; i < arms; ++i) {
        if (omegas[i] < 0.0 || omegas[i] > 2.0 * bias_bounds[i] + kBiasTolerance)
            throw BiasViolation(i, "omega outside [0, 2V] for arm " + std::to_string(i));
    }
}

TheoryInstance make_theory_instance(const Environment& env, const MeanVector& mu_off,
                                    const BiasVector& bias, std::vector<Count> offline_counts,
                                    std::uint64_t horizon, double alpha) {
    const auto& mu_on = env.spec().mean;
    TheoryInstance inst;
    inst.arms = env.arms();
    inst.max_triggered = env.max_triggerable();
    inst.smoothness = env.model() == EnvModel::SingleTrigger ? env.spec().reward_scale : 1.0;
    inst.horizon = horizon;
    inst.offline_counts = std::move(offline_counts);
    if (mu_off.size() != inst.arms || bias.size() != inst.arms)
        throw ShapeError("offline means and bias vector must have length m");
    inst.bias_bounds.assign(bias.values().begin(), bias.values().end());
    inst.omegas.resize(inst.arms);
    for (std::size_t i = 0; i < inst.arms; ++i) inst.omegas[i] = omega(bias[i], mu_off[i], mu_on[i], i);
    inst.gaps = compute_gaps(env, mu_on, alpha);
    inst.validate();
    return inst;
}

double effective_offline_gapdep(Count offline_count, double smoothness, std::size_t max_triggered,
                                double omega_i, double min_gap_i) {
    const double n = static_cast<double>(offline_count);
    if (std::isinf(min_gap_i)) return n;
    if (!(min_gap_i > 0.0)) throw DomainError("Delta_min^i must be positive or infinite");
    const double rate =
        squared_clamp(1.0 - 2.0 * smoothness * static_cast<double>(max_triggered) * omega_i / min_gap_i);
    return n * rate;
}

double gap_dependent_bound_with(const TheoryInstance& inst, const std::vector<double>& effective) {
    inst.validate();
    if (effective.size() != inst.arms) throw ShapeError("effective counts must have length m");
    const double log_term = horizon_log_term(inst.arms, inst.horizon);
    const double b = inst.smoothness;
    const double k = static_cast<double>(inst.max_triggered);
    double sum = 0.0;
    for (std::size_t i = 0; i < inst.arms; ++i) {
        const double gap = inst.gaps.arm_min_gap[i];
        if (std::isinf(gap)) continue;
        const double explore = 64.0 * std::numbers::sqrt2 * b * b * k * log_term / gap;
        const double saving = 8.0 * b * std::sqrt(2.0 * effective[i] * log_term);
        sum += std::max(explore - saving, 0.0);
    }
    return sum + additive_terms(inst);
}

double gap_dependent_bound(const TheoryInstance& inst) {
    std::vector<double> effective(inst.arms);
    for (std::size_t i = 0; i < inst.arms; ++i) {
        effective[i] = effective_offline_gapdep(inst.offline_counts.at(i), inst.smoothness,
                                                inst.max_triggered, inst.omegas.at(i),
                                                inst.gaps.arm_min_gap.at(i));
    }
    return gap_dependent_bound_with(inst, effective);
}

double effective_offline_gapindep(Count offline_count, double omega_i, std::size_t max_triggered,
                                  std::uint64_t horizon, std::size_t arms) {
    const double log_term = horizon_log_term(arms, horizon);
    const double kt = static_cast<double>(max_triggered) * static_cast<double>(horizon);
    const double factor = 1.0 - omega_i / (4.0 * std::numbers::sqrt2) *
                                    std::sqrt(kt / (static_cast<double>(arms) * log_term));
    return static_cast<double>(offline_count) * squared_clamp(factor);
}

double psi_bound_with(const TheoryInstance& inst, const std::vector<double>& effective) {
    inst.validate();
    if (effective.size() != inst.arms) throw ShapeError("effective counts must have length m");
    const double log_term = horizon_log_term(inst.arms, inst.horizon);
    const double m = static_cast<double>(inst.arms);
    const double kt = static_cast<double>(inst.max_triggered) * static_cast<double>(inst.horizon);
    const double per_arm = std::sqrt(kt / m);
    double sum = 0.0;
    for (double n : effective) sum += std::max(per_arm - std::sqrt(n), 0.0);
    return 8.0 * std::numbers::sqrt2 * inst.smoothness * std::sqrt(log_term) * (sum + std::sqrt(m * kt));
}

double psi_bound(const TheoryInstance& inst) {
    std::vector<double> effective(inst.arms);
    for (std::size_t i = 0; i < inst.arms; ++i) {
        effective[i] = effective_offline_gapindep(inst.offline_counts.at(i), inst.omegas.at(i),
                                                  inst.max_triggered, inst.horizon, inst.arms);
    }
    return psi_bound_with(inst, effective);
}

TauStarSolution solve_tau_star_budget(const std::vector<Count>& offline_counts,
                                      std::uint64_t budget) {
    const std::size_t m = offline_counts.size();
    if (m == 0) throw ShapeError("tau* needs at least one arm");
    std::vector<Count> sorted(offline_counts);
    std::sort(sorted.begin(), sorted.end());

    TauStarSolution sol;
    unsigned __int128 prefix = 0;
    for (std::size_t k = 1; k <= m; ++k) {
        prefix += sorted[k - 1];
        const unsigned __int128 filled = prefix + budget;
        const double level = static_cast<double>(filled) / static_cast<double>(k);
        const bool last = k == m;
        // The water level stops rising once it would submerge the next arm.
        if (last || filled <= static_cast<unsigned __int128>(sorted[k]) * k) {
            sol.tau = level;
            sol.tau_integer = static_cast<std::uint64_t>(filled / k);
            break;
        }
    }
    sol.allocation.resize(m);
    sol.allocation_integer.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double n = static_cast<double>(offline_counts[i]);
        sol.allocation[i] = std::max(sol.tau - n, 0.0);
        sol.allocation_integer[i] =
            sol.tau_integer > offline_counts[i] ? sol.tau_integer - offline_counts[i] : 0;
    }
    return sol;
}

TauStarSolution solve_tau_star(const std::vector<Count>& offline_counts,
                               std::size_t max_triggered, std::uint64_t horizon) {
    return solve_tau_star_budget(offline_counts, static_cast<std::uint64_t>(max_triggered) * horizon);
}

GammaValue gamma_bound(const TheoryInstance& inst, const TauStarSolution& tau) {
    inst.validate();
    const double log_term = horizon_log_term(inst.arms, inst.horizon);
    const double bkt = inst.smoothness * static_cast<double>(inst.max_triggered) *
                       static_cast<double>(inst.horizon);
    const double omega_max = *std::max_element(inst.omegas.begin(), inst.omegas.end());
    GammaValue out;
    if (tau.tau_integer == 0) {
        out.value = kInf;
        out.diagnostic = "tau* rounds down to 0 (K T < m with no offline data); gamma is unbounded";
        return out;
    }
    out.value = 16.0 * bkt * std::sqrt(2.0 * log_term / static_cast<double>(tau.tau_integer)) +
                bkt * omega_max;
    return out;
}

GapIndependentBound gap_independent_bound(const TheoryInstance& inst) {
    GapIndependentBound out;
    out.psi = psi_bound(inst);
    out.gamma = gamma_bound(inst, solve_tau_star(inst.offline_counts, inst.max_triggered, inst.horizon)).value;
    out.additive = additive_terms(inst);
    out.branch = out.gamma < out.psi ? GapIndependentBranch::Gamma : GapIndependentBranch::Psi;
    out.value = std::min(out.psi, out.gamma) + out.additive;
    return out;
}

ApproxRegret approx_regret(const std::vector<double>& expected_rewards, double opt, double alpha,
                           double beta) {
    const double total = std::accumulate(expected_rewards.begin(), expected_rewards.end(), 0.0);
    ApproxRegret out;
    out.value = alpha * beta * static_cast<double>(expected_rewards.size()) * opt - total;
    out.negative = out.value < 0.0;
    return out;
}

bool DecompositionReport::passed() const {
    return std::all_of(arms.begin(), arms.end(),
                       [](const DecompositionArm& a) { return a.within_tolerance; });
}

std::vector<Action> lower_bound_actions(std::size_t arms, std::size_t slots) {
    if (slots == 0 || slots > arms) throw ShapeError("lower-bound instance needs 1 <= K <= m");
    std::vector<Action> actions;
    Action best(slots);
    std::iota(best.begin(), best.end(), ArmIndex{0});
    actions.push_back(best);
    for (ArmIndex i = slots; i < arms; ++i) {
        Action a(slots - 1, 0);
        a.push_back(i);
        actions.push_back(std::move(a));
    }
    return actions;
}

DecompositionReport lowerbound_decomposition_check(const Environment& env, const Oracle& oracle,
                                                   const PolicyConfig& policy,
                                                   const OfflineDataset& data,
                                                   const BiasVector& bias, std::uint64_t horizon,
                                                   std::uint64_t replications,
                                                   std::uint64_t seed) {
    require_single_trigger(env);
    const auto gaps = base_gaps(env);
    const double b = env.spec().reward_scale;
    const double k = static_cast<double>(env.action_size());
    const std::size_t m = env.arms();
    std::vector<std::vector<double>> regret(m, std::vector<double>(replications));
    std::vector<std::vector<double>> scaled(m, std::vector<double>(replications));
    for (std::uint64_t r = 0; r < replications; ++r) {
        EpisodeStreams streams{RngStream(seed, r, StreamPurpose::Outcomes),
                               RngStream(seed, r, StreamPurpose::Trigger)};
        const auto logs = run_episode(policy, data, bias, env, oracle, horizon, std::move(streams));
        std::vector<double> slots(m, 0.0), triggers(m, 0.0);
        for (const auto& log : logs) {
            for (ArmIndex a : log.action) slots[a] += 1.0;
            for (const auto& obs : log.triggered) triggers[obs.arm] += 1.0;
        }
        for (std::size_t i = 0; i < m; ++i) {
            regret[i][r] = b / k * gaps[i] * slots[i];
            scaled[i][r] = b * gaps[i] * triggers[i];
        }
    }
    return summarize_decomposition(gaps, regret, scaled, replications);
}

DecompositionReport lowerbound_decomposition_random(const Environment& env,
                                                    const std::vector<Action>& actions,
                                                    std::uint64_t horizon,
                                                    std::uint64_t replications,
                                                    std::uint64_t seed) {
    require_single_trigger(env);
    if (actions.empty()) throw ShapeError("random policy needs at least one action");
    for (const auto& a : actions) env.validate_action(a);
    const auto gaps = base_gaps(env);
    const double b = env.spec().reward_scale;
    const double k = static_cast<double>(env.action_size());
    const std::size_t m = env.arms();
    std::vector<std::vector<double>> regret(m, std::vector<double>(replications));
    std::vector<std::vector<double>> scaled(m, std::vector<double>(replications));
    for (std::uint64_t r = 0; r < replications; ++r) {
        RngStream outcomes(seed, r, StreamPurpose::Outcomes);
        RngStream trigger(seed, r, StreamPurpose::Trigger);
        RngStream choice(seed, r, StreamPurpose::Policy);
        std::vector<double> slots(m, 0.0), triggers(m, 0.0);
        for (std::uint64_t t = 0; t < horizon; ++t) {
            const Action& a = actions[static_cast<std::size_t>(choice.index(actions.size()))];
            const auto x = sample_outcomes(outcomes, env.spec().mean);
            for (ArmIndex arm : a) slots[arm] += 1.0;
            for (const auto& obs : env.trigger(a, x, trigger)) triggers[obs.arm] += 1.0;
        }
        for (std::size_t i = 0; i < m; ++i) {
            regret[i][r] = b / k * gaps[i] * slots[i];
            scaled[i][r] = b * gaps[i] * triggers[i];
        }
    }
    return summarize_decomposition(gaps, regret, scaled, replications);
}

}  // namespace hcmab
