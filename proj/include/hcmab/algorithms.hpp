#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hcmab/core.hpp"
#include "hcmab/env.hpp"
#include "hcmab/oracle.hpp"
#include "hcmab/rng.hpp"

namespace hcmab {

enum class PolicyKind { HybridCucb, Cucb, ClcbFixed };

const char* to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);

inline constexpr double kDefaultClcbDelta = 0.01;

/// Online confidence radius sqrt(2 log(4 m t^3) / T_i); +inf when T_i = 0.
double rad_online(std::uint64_t t, std::size_t arms, Count online_count);

/// Hybrid radius sqrt(2 log(4 m t^3) / (N_i + T_i)) + N_i V_i / (N_i + T_i);
/// +inf when N_i + T_i = 0.
double rad_hybrid(std::uint64_t t, std::size_t arms, Count offline_count, Count online_count,
                  double bias_bound);

struct ArmBounds {
    double rad = 0.0;
    double rad_hybrid = 0.0;
    double ucb = 0.0;
    double ucb_hybrid = 0.0;
    double mu_bar = 0.0;
};

/// UCB_t(i) and UCB^S_t(i) for one arm, and mu_bar = min{UCB, UCB^S, 1}.
ArmBounds hybrid_bounds(const ArmState& state, std::uint64_t t, std::size_t arms);

/// min{UCB_t(i), UCB^S_t(i), 1}.
double hybrid_mu_bar(const ArmState& state, std::uint64_t t, std::size_t arms);

/// min{UCB_t(i), 1}; the hybrid fields of the result are +inf.
ArmBounds online_bounds(const ArmState& state, std::uint64_t t, std::size_t arms);

struct PolicyConfig {
    PolicyKind kind = PolicyKind::HybridCucb;
    double clcb_delta = kDefaultClcbDelta;
};

struct PolicyState {
    PolicyKind kind = PolicyKind::HybridCucb;
    std::vector<ArmState> arms;
    std::uint64_t t = 1;
    std::optional<Action> committed;  // clcb-fixed only
};

PolicyState make_policy_state(const PolicyConfig& config, const OfflineDataset& data,
                              const BiasVector& bias, const Oracle& oracle);

struct RoundLog {
    std::uint64_t t = 0;
    Action action;
    std::vector<double> mu_bar;
    std::vector<ArmBounds> bounds;  // empty for clcb-fixed
    TriggerOutcome triggered;
    double realized_reward = 0.0;
};

/// Streams consumed by one episode. Outcome vectors are drawn for every arm
/// every round, independent of the policy.
struct EpisodeStreams {
    RngStream outcomes;
    RngStream trigger;
};

RoundLog hybrid_cucb_round(PolicyState& state, const Environment& env, const Oracle& oracle,
                           EpisodeStreams& streams);
RoundLog cucb_round(PolicyState& state, const Environment& env, const Oracle& oracle,
                    EpisodeStreams& streams);

/// Pessimistic offline action: LCB_i = max{mu_off_i - sqrt(2 log(2m/delta)/N_i), 0}
/// (0 when N_i = 0) fed to the oracle.
Action clcb_select(const OfflineDataset& data, const Oracle& oracle, double delta);

/// One round for whichever policy `state` holds.
RoundLog policy_round(PolicyState& state, const Environment& env, const Oracle& oracle,
                      EpisodeStreams& streams);

std::vector<RoundLog> run_episode(const PolicyConfig& config, const OfflineDataset& data,
                                  const BiasVector& bias, const Environment& env,
                                  const Oracle& oracle, std::uint64_t horizon,
                                  EpisodeStreams streams);

/// Tab-separated record, fixed column order:
/// t, action, mu_bar, ucb, ucb_hybrid, triggered, realized_reward.
/// Lists are comma-separated; triggered entries are arm:value; infinities print as inf.
std::string format_round_log(const RoundLog& log);
std::string round_log_header();

}  // namespace hcmab
