#include "hcmab/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hcmab/errors.hpp"
#include "hcmab/text.hpp"

namespace hcmab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double offline_online_mean(const ArmState& s) {
    // Special cases are the formula's exact limits; they keep the N_i = 0 path
    // bit-identical to plain CUCB.
    if (s.offline_count == 0) return s.online_mean;
    const double off = s.offline_mean.value_or(0.0);
    if (s.trigger_count == 0) return off;
    const double n = static_cast<double>(s.offline_count);
    const double t = static_cast<double>(s.trigger_count);
    return (n * off + t * s.online_mean) / (n + t);
}

MeanVector clamped_means(const std::vector<double>& values) {
    std::vector<double> v(values);
    for (auto& x : v) x = std::clamp(x, 0.0, 1.0);
    return MeanVector(std::move(v));
}

RoundLog play(PolicyState& state, const Environment& env, const Action& action,
              EpisodeStreams& streams, bool learn) {
    RoundLog log;
    log.t = state.t;
    log.action = action;
    const auto x = sample_outcomes(streams.outcomes, env.spec().mean);
    log.triggered = env.trigger(action, x, streams.trigger);
    log.realized_reward = env.realized_reward(action, log.triggered);
    if (learn) {
        for (const auto& obs : log.triggered) update_online_mean(state.arms[obs.arm], obs.value);
    }
    state.t += 1;
    return log;
}

RoundLog ucb_round(PolicyState& state, const Environment& env, const Oracle& oracle,
                   EpisodeStreams& streams, bool hybrid) {
    if (state.t == 0) throw DomainError("round index starts at 1");
    const std::size_t m = state.arms.size();
    if (m != env.arms()) throw ShapeError("policy state and environment arm counts differ");
    std::vector<ArmBounds> bounds(m);
    std::vector<double> mu_bar(m);
    for (std::size_t i = 0; i < m; ++i) {
        bounds[i] = hybrid ? hybrid_bounds(state.arms[i], state.t, m)
                           : online_bounds(state.arms[i], state.t, m);
        mu_bar[i] = bounds[i].mu_bar;
    }
    const OracleResult chosen = oracle.select(MeanVector(mu_bar));
    env.validate_action(chosen.action);
    RoundLog log = play(state, env, chosen.action, streams, true);
    log.mu_bar = std::move(mu_bar);
    log.bounds = std::move(bounds);
    return log;
}

}  // namespace

const char* to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::HybridCucb: return "hybrid-cucb";
        case PolicyKind::Cucb: return "cucb";
        case PolicyKind::ClcbFixed: return "clcb";
    }
    return "?";
}

PolicyKind policy_kind_from_string(const std::string& name) {
    if (name == "hybrid-cucb") return PolicyKind::HybridCucb;
    if (name == "cucb") return PolicyKind::Cucb;
    if (name == "clcb" || name == "clcb-fixed") return PolicyKind::ClcbFixed;
    throw ConfigError("unknown algorithm '" + name + "'");
}

double rad_online(std::uint64_t t, std::size_t arms, Count online_count) {
    if (t == 0) throw DomainError("round index starts at 1");
    if (online_count == 0) return kInf;
    return std::sqrt(2.0 * confidence_log_term(t, arms) / static_cast<double>(online_count));
}

double rad_hybrid(std::uint64_t t, std::size_t arms, Count offline_count, Count online_count,
                  double bias_bound) {
    if (t == 0) throw DomainError("round index starts at 1");
    if (!(bias_bound >= 0.0)) throw DomainError("bias bound must be nonnegative");
    const Count total = offline_count + online_count;
    if (total == 0) return kInf;
    const double n = static_cast<double>(total);
    return std::sqrt(2.0 * confidence_log_term(t, arms) / n) +
           static_cast<double>(offline_count) / n * bias_bound;
}

ArmBounds hybrid_bounds(const ArmState& state, std::uint64_t t, std::size_t arms) {
    ArmBounds b;
    b.rad = rad_online(t, arms, state.trigger_count);
    b.rad_hybrid = rad_hybrid(t, arms, state.offline_count, state.trigger_count, state.bias_bound);
    b.ucb = state.trigger_count == 0 ? kInf : state.online_mean + b.rad;
    b.ucb_hybrid = (state.offline_count + state.trigger_count == 0)
                       ? kInf
                       : offline_online_mean(state) + b.rad_hybrid;
    b.mu_bar = std::min({b.ucb, b.ucb_hybrid, 1.0});
    return b;
}

double hybrid_mu_bar(const ArmState& state, std::uint64_t t, std::size_t arms) {
    return hybrid_bounds(state, t, arms).mu_bar;
}

ArmBounds online_bounds(const ArmState& state, std::uint64_t t, std::size_t arms) {
    ArmBounds b;
    b.rad = rad_online(t, arms, state.trigger_count);
    b.ucb = state.trigger_count == 0 ? kInf : state.online_mean + b.rad;
    b.rad_hybrid = kInf;
    b.ucb_hybrid = kInf;
    b.mu_bar = std::min(b.ucb, 1.0);
    return b;
}

Action clcb_select(const OfflineDataset& data, const Oracle& oracle, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("CLCB delta must lie in (0,1)");
    const std::size_t m = data.arms();
    const double log_term = std::log(2.0 * static_cast<double>(m) / delta);
    std::vector<double> lcb(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const Count n = data.count(i);
        if (n == 0) continue;
        lcb[i] = std::max(*data.mean(i) - std::sqrt(2.0 * log_term / static_cast<double>(n)), 0.0);
    }
    return oracle.select(clamped_means(lcb)).action;
}

PolicyState make_policy_state(const PolicyConfig& config, const OfflineDataset& data,
                              const BiasVector& bias, const Oracle& oracle) {
    PolicyState state;
    state.kind = config.kind;
    state.arms = initial_arm_states(data, bias);
    if (config.kind == PolicyKind::ClcbFixed) state.committed = clcb_select(data, oracle, config.clcb_delta);
    return state;
}

RoundLog hybrid_cucb_round(PolicyState& state, const Environment& env, const Oracle& oracle,
                           EpisodeStreams& streams) {
    return ucb_round(state, env, oracle, streams, true);
}

RoundLog cucb_round(PolicyState& state, const Environment& env, const Oracle& oracle,
                    EpisodeStreams& streams) {
    return ucb_round(state, env, oracle, streams, false);
}

RoundLog policy_round(PolicyState& state, const Environment& env, const Oracle& oracle,
                      EpisodeStreams& streams) {
    switch (state.kind) {
        case PolicyKind::HybridCucb: return hybrid_cucb_round(state, env, oracle, streams);
        case PolicyKind::Cucb: return cucb_round(state, env, oracle, streams);
        case PolicyKind::ClcbFixed: {
            if (!state.committed) throw ConfigError("clcb policy state has no committed action");
            env.validate_action(*state.committed);
            RoundLog log = play(state, env, *state.committed, streams, false);
            return log;
        }
    }
    throw ConfigError("unknown policy");
}

std::vector<RoundLog> run_episode(const PolicyConfig& config, const OfflineDataset& data,
                                  const BiasVector& bias, const Environment& env,
                                  const Oracle& oracle, std::uint64_t horizon,
                                  EpisodeStreams streams) {
    if (horizon == 0) throw DomainError("horizon must be at least 1");
    PolicyState state = make_policy_state(config, data, bias, oracle);
    std::vector<RoundLog> logs;
    logs.reserve(horizon);
    for (std::uint64_t t = 0; t < horizon; ++t) logs.push_back(policy_round(state, env, oracle, streams));
    return logs;
}

std::string round_log_header() {
    return "t\taction\tmu_bar\tucb\tucb_hybrid\ttriggered\trealized_reward";
}

std::string format_round_log(const RoundLog& log) {
    using text::format_double;
    std::string out = std::to_string(log.t);
    out += '\t';
    out += text::join(log.action, ',', [](ArmIndex a) { return std::to_string(a); });
    out += '\t';
    out += text::join(log.mu_bar, ',', format_double);
    out += '\t';
    out += text::join(log.bounds, ',', [](const ArmBounds& b) { return format_double(b.ucb); });
    out += '\t';
    out += text::join(log.bounds, ',', [](const ArmBounds& b) { return format_double(b.ucb_hybrid); });
    out += '\t';
    out += text::join(log.triggered, ',', [](const Observation& o) {
        return std::to_string(o.arm) + ":" + format_double(o.value);
    });
    out += '\t';
    out += format_double(log.realized_reward);
    return out;
}

}  // namespace hcmab
