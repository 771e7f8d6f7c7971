#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "hcmab/core.hpp"
#include "hcmab/env.hpp"

namespace hcmab {

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

struct OracleResult {
    Action action;
    double alpha = 1.0;
    double beta = 1.0;
};

struct OptValue {
    double opt = 0.0;
    Action argmax;
};

/// (alpha, beta)-approximation oracle over clamped mean estimates. Oracles
/// never clamp their input.
class Oracle {
public:
    virtual ~Oracle() = default;
    virtual OracleResult select(const MeanVector& mu_bar) const = 0;
};

/// The k arms with the largest means, ordered by descending mean then by index.
/// Exact for the cascade reward, which depends only on the chosen set.
class TopKOracle final : public Oracle {
public:
    explicit TopKOracle(std::size_t k) : k_(k) {}
    OracleResult select(const MeanVector& mu_bar) const override;

private:
    std::size_t k_;
};

/// K copies of the best arm: exact for the single-trigger reward over K-multisets.
class BestArmOracle final : public Oracle {
public:
    explicit BestArmOracle(std::size_t slots) : slots_(slots) {}
    OracleResult select(const MeanVector& mu_bar) const override;

private:
    std::size_t slots_;
};

/// Exact oracle over an explicit action list; first maximizer wins.
class ActionListOracle final : public Oracle {
public:
    ActionListOracle(const Environment& env, std::vector<Action> actions);
    OracleResult select(const MeanVector& mu_bar) const override;
    const std::vector<Action>& actions() const noexcept { return actions_; }

private:
    const Environment* env_;
    std::vector<Action> actions_;
};

OracleResult top_k_oracle(const MeanVector& mu_bar, std::size_t k);

/// Exact oracle matching the environment's full action space.
std::unique_ptr<Oracle> make_exact_oracle(const Environment& env);

/// opt_mu by enumeration (cascade) or closed form B * max_i mu_i (single-trigger).
OptValue compute_opt(const Environment& env, const MeanVector& mu,
                     std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace hcmab
