#include "hcmab/oracle.hpp"

#include <algorithm>
#include <numeric>

#include "hcmab/errors.hpp"

namespace hcmab {

OracleResult top_k_oracle(const MeanVector& mu_bar, std::size_t k) {
    const std::size_t m = mu_bar.size();
    if (k == 0 || k > m) throw ShapeError("top-k oracle needs 1 <= k <= m");
    Action order(m);
    std::iota(order.begin(), order.end(), ArmIndex{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](ArmIndex a, ArmIndex b) { return mu_bar[a] > mu_bar[b]; });
    order.resize(k);
    return {std::move(order), 1.0, 1.0};
}

OracleResult TopKOracle::select(const MeanVector& mu_bar) const {
    return top_k_oracle(mu_bar, k_);
}

OracleResult BestArmOracle::select(const MeanVector& mu_bar) const {
    if (mu_bar.size() == 0 || slots_ == 0) throw ShapeError("best-arm oracle needs arms and slots");
    ArmIndex best = 0;
    for (ArmIndex i = 1; i < mu_bar.size(); ++i) {
        if (mu_bar[i] > mu_bar[best]) best = i;
    }
    return {Action(slots_, best), 1.0, 1.0};
}

ActionListOracle::ActionListOracle(const Environment& env, std::vector<Action> actions)
    : env_(&env), actions_(std::move(actions)) {
    if (actions_.empty()) throw ShapeError("action-list oracle needs at least one action");
    for (const auto& a : actions_) env.validate_action(a);
}

OracleResult ActionListOracle::select(const MeanVector& mu_bar) const {
    std::size_t best = 0;
    double best_value = env_->expected_reward(actions_[0], mu_bar);
    for (std::size_t j = 1; j < actions_.size(); ++j) {
        const double v = env_->expected_reward(actions_[j], mu_bar);
        if (v > best_value) {
            best_value = v;
            best = j;
        }
    }
    return {actions_[best], 1.0, 1.0};
}

std::unique_ptr<Oracle> make_exact_oracle(const Environment& env) {
    switch (env.model()) {
        case EnvModel::Cascade: return std::make_unique<TopKOracle>(env.action_size());
        case EnvModel::SingleTrigger: return std::make_unique<BestArmOracle>(env.action_size());
    }
    throw ConfigError("no exact oracle for this environment");
}

OptValue compute_opt(const Environment& env, const MeanVector& mu, std::uint64_t cap) {
    if (mu.size() != env.arms()) throw ShapeError("mean vector length differs from arm count");
    if (env.model() == EnvModel::SingleTrigger) {
        ArmIndex best = 0;
        for (ArmIndex i = 1; i < mu.size(); ++i) {
            if (mu[i] > mu[best]) best = i;
        }
        Action a(env.action_size(), best);
        return {env.expected_reward(a, mu), std::move(a)};
    }
    OptValue out{-1.0, {}};
    for (auto& a : env.enumerate_actions(cap)) {
        const double r = env.expected_reward(a, mu);
        if (r > out.opt) {
            out.opt = r;
            out.argmax = std::move(a);
        }
    }
    return out;
}

}  // namespace hcmab
