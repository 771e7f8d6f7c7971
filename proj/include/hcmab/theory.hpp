#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hcmab/algorithms.hpp"
#include "hcmab/core.hpp"
#include "hcmab/env.hpp"
#include "hcmab/oracle.hpp"

namespace hcmab {

/// Reward gaps of every action and their per-arm extremes. Arms never in a
/// positive-gap action have min_gap = +inf and max_gap = 0.
struct GapProfile {
    std::vector<double> arm_min_gap;
    std::vector<double> arm_max_gap;
    double min_gap = 0.0;
    double max_gap = 0.0;
    double opt = 0.0;
    std::vector<std::pair<Action, double>> action_gaps;
};

/// Exact gaps Delta_S = max(0, alpha * opt - r_S(mu)) by enumeration.
///
/// For the cascade model an arm in S can be placed first by some ordering of S,
/// and all orderings share one reward, so membership decides p_i > 0.
GapProfile compute_gaps(const Environment& env, const MeanVector& mu, double alpha,
                        std::uint64_t cap = kDefaultEnumerationCap);

struct TheoryInstance {
    std::size_t arms = 0;
    std::size_t max_triggered = 1;  // K
    double smoothness = 1.0;        // B
    std::uint64_t horizon = 1;      // T
    std::vector<Count> offline_counts;
    std::vector<double> omegas;
    std::vector<double> bias_bounds;
    GapProfile gaps;

    void validate() const;
};

/// Builds a theory instance from the online/offline means, counting omegas
/// against the bias bounds.
TheoryInstance make_theory_instance(const Environment& env, const MeanVector& mu_off,
                                    const BiasVector& bias, std::vector<Count> offline_counts,
                                    std::uint64_t horizon, double alpha = 1.0);

/// N_i' = N_i * max{1 - 2 B K omega_i / Delta_min^i, 0}^2 (N_i when Delta_min^i is infinite).
double effective_offline_gapdep(Count offline_count, double smoothness, std::size_t max_triggered,
                                double omega_i, double min_gap_i);

/// Gap-dependent regret bound. Arms with infinite Delta_min^i contribute nothing
/// to the sum.
double gap_dependent_bound(const TheoryInstance& inst);

/// Gap-dependent bound evaluated with caller-supplied effective counts N_i'.
double gap_dependent_bound_with(const TheoryInstance& inst, const std::vector<double>& effective);

/// N_i'' = N_i * max{1 - (omega_i / 4 sqrt 2) sqrt(K T / (m log(4 m T^3))), 0}^2.
double effective_offline_gapindep(Count offline_count, double omega_i, std::size_t max_triggered,
                                  std::uint64_t horizon, std::size_t arms);

double psi_bound(const TheoryInstance& inst);
double psi_bound_with(const TheoryInstance& inst, const std::vector<double>& effective);

struct TauStarSolution {
    double tau = 0.0;
    std::vector<double> allocation;  // n_*(i) = max{tau - N_i, 0}
    std::uint64_t tau_integer = 0;   // largest integer level feasible with integer n
    std::vector<std::uint64_t> allocation_integer;
};

/// Water-filling solution of max tau s.t. tau <= N_i + n(i), sum_i n(i) <= K T.
TauStarSolution solve_tau_star(const std::vector<Count>& offline_counts,
                               std::size_t max_triggered, std::uint64_t horizon);
TauStarSolution solve_tau_star_budget(const std::vector<Count>& offline_counts,
                                      std::uint64_t budget);

struct GammaValue {
    double value = 0.0;
    std::string diagnostic;  // set when tau = 0 made the bound infinite
};

/// gamma = 16 B K T sqrt(2 log(4 m T^3) / tau) + B K T omega_max, evaluated at
/// the integer level.
GammaValue gamma_bound(const TheoryInstance& inst, const TauStarSolution& tau);

enum class GapIndependentBranch { Psi, Gamma };

struct GapIndependentBound {
    double value = 0.0;
    double psi = 0.0;
    double gamma = 0.0;
    double additive = 0.0;  // 4 B m + (pi^2 / 6) Delta_max
    GapIndependentBranch branch = GapIndependentBranch::Psi;
};

GapIndependentBound gap_independent_bound(const TheoryInstance& inst);

struct ApproxRegret {
    double value = 0.0;
    bool negative = false;
};

/// alpha * beta * T * opt - sum_t r_{S_t}(mu). Never clipped.
ApproxRegret approx_regret(const std::vector<double>& expected_rewards, double opt, double alpha,
                           double beta);

/// Per-arm regret attribution on the single-trigger instance.
struct DecompositionArm {
    double gap = 0.0;             // Delta_i = mu_max - mu_i
    double mean_regret = 0.0;     // mean over replications of sum_t (B/K) c_i(S_t) Delta_i
    double mean_scaled_triggers = 0.0;  // mean of B Delta_i T_i
    double difference_se = 0.0;   // standard error of the paired difference
    bool within_tolerance = false;
};

struct DecompositionReport {
    std::vector<DecompositionArm> arms;
    double tolerance_se = 4.0;
    std::uint64_t replications = 0;
    bool passed() const;
};

/// Builds the lower-bound instance's action list: S* = (0..K-1) and, for each
/// arm i >= K, S_i = K-1 copies of arm 0 plus arm i.
std::vector<Action> lower_bound_actions(std::size_t arms, std::size_t slots);

/// Checks Reg_i(T) = B Delta_i E[T_i] per arm on a single-trigger environment,
/// over `replications` episodes of `policy`, within 4 standard errors.
DecompositionReport lowerbound_decomposition_check(const Environment& env, const Oracle& oracle,
                                                   const PolicyConfig& policy,
                                                   const OfflineDataset& data,
                                                   const BiasVector& bias, std::uint64_t horizon,
                                                   std::uint64_t replications,
                                                   std::uint64_t seed);

/// Same identity under a uniformly random choice among `actions` each round.
DecompositionReport lowerbound_decomposition_random(const Environment& env,
                                                    const std::vector<Action>& actions,
                                                    std::uint64_t horizon,
                                                    std::uint64_t replications,
                                                    std::uint64_t seed);

}  // namespace hcmab
