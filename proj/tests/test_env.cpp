#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hcmab/env.hpp"
#include "hcmab/errors.hpp"

using namespace hcmab;

namespace {

EnvSpec cascade(std::vector<double> mu, std::size_t k) {
    const auto m = mu.size();
    return EnvSpec{EnvModel::Cascade, m, k, MeanVector(std::move(mu)), 1.0};
}

EnvSpec single(std::vector<double> mu, std::size_t k, double b) {
    const auto m = mu.size();
    return EnvSpec{EnvModel::SingleTrigger, m, k, MeanVector(std::move(mu)), b};
}

// Reference: 1 - prod(1 - mu) in the order given.
double product_reward(const Action& a, const std::vector<double>& mu) {
    double p = 1.0;
    for (auto i : a) p *= 1.0 - mu[i];
    return 1.0 - p;
}

}  // namespace

TEST(SampleOutcomes, DegenerateArms) {
    RngStream r(1);
    const MeanVector mu({0.0, 1.0, 0.0, 1.0});
    for (int i = 0; i < 1000; ++i) {
        const auto x = sample_outcomes(r, mu);
        ASSERT_EQ(x.size(), 4u);
        EXPECT_EQ(x[0], 0);
        EXPECT_EQ(x[1], 1);
        EXPECT_EQ(x[2], 0);
        EXPECT_EQ(x[3], 1);
    }
}

TEST(SampleOutcomes, HalfMean) {
    RngStream r(2);
    const MeanVector mu({0.5});
    double sum = 0;
    const int n = 100'000;
    for (int i = 0; i < n; ++i) sum += sample_outcomes(r, mu)[0];
    EXPECT_NEAR(sum / n, 0.5, 0.01);
}

TEST(CascadeTrigger, StopsAtFirstSuccess) {
    const std::vector<std::uint8_t> x{0, 0, 1, 1};  // arm 0 unused
    const Action s{1, 2, 3};
    const auto tau = cascade_trigger(s, x);
    EXPECT_EQ(tau, (TriggerOutcome{{1, 0.0}, {2, 1.0}}));
    EXPECT_EQ(cascade_reward_realized(tau), 1.0);
}

TEST(CascadeTrigger, FirstArmSucceeds) {
    const std::vector<std::uint8_t> x{0, 1, 1, 1};
    EXPECT_EQ(cascade_trigger(Action{1, 2, 3}, x), (TriggerOutcome{{1, 1.0}}));
}

TEST(CascadeTrigger, AllFail) {
    const std::vector<std::uint8_t> x{0, 0, 0, 0};
    const auto tau = cascade_trigger(Action{1, 2, 3}, x);
    EXPECT_EQ(tau, (TriggerOutcome{{1, 0.0}, {2, 0.0}, {3, 0.0}}));
    EXPECT_EQ(cascade_reward_realized(tau), 0.0);
}

TEST(CascadeTrigger, DuplicateRejected) {
    const std::vector<std::uint8_t> x{0, 0, 0, 0};
    EXPECT_THROW(cascade_trigger(Action{1, 1, 3}, x), InvalidAction);
}

TEST(CascadeReward, Examples) {
    const MeanVector zeros({0.0, 0.0, 0.0});
    EXPECT_EQ(cascade_reward_expected(Action{0, 1}, zeros), 0.0);
    const MeanVector mu({0.5, 0.4});
    EXPECT_EQ(cascade_reward_expected(Action{0}, mu), 0.5);
    EXPECT_NEAR(cascade_reward_expected(Action{0, 1}, mu), 1.0 - 0.5 * 0.6, 1e-15);
    EXPECT_NEAR(cascade_reward_expected(Action{0, 1}, mu), 0.7, 1e-12);
}

TEST(CascadeReward, PermutationInvariant) {
    RngStream r(3);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v(5);
        for (auto& x : v) x = r.uniform01();
        const MeanVector mu(v);
        Action a{4, 1, 2};
        std::sort(a.begin(), a.end());
        const double ref = cascade_reward_expected(a, mu);
        EXPECT_NEAR(ref, product_reward(a, v), 1e-15);
        do {
            EXPECT_EQ(cascade_reward_expected(a, mu), ref);
        } while (std::next_permutation(a.begin(), a.end()));
    }
}

TEST(CascadeReward, StopProbabilitiesSumToOne) {
    RngStream r(4);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v(6);
        for (auto& x : v) x = r.uniform01();
        const CascadeEnvironment env(cascade(v, 4));
        const MeanVector mu(v);
        const Action a{5, 0, 3, 2};
        double total = 0.0, none = 1.0;
        for (auto i : a) {
            total += env.trigger_prob(a, mu, i) * v[i];  // reach i and stop there
            none *= 1.0 - v[i];
        }
        EXPECT_NEAR(total + none, 1.0, 1e-12);
    }
}

TEST(TriggerProb, CascadeProductOverPredecessors) {
    const CascadeEnvironment env(cascade({0.1, 0.5, 0.4}, 2));
    const MeanVector mu({0.1, 0.5, 0.4});
    const Action s{1, 2};
    EXPECT_EQ(env.trigger_prob(s, mu, 1), 1.0);
    EXPECT_EQ(env.trigger_prob(s, mu, 2), 0.5);
    EXPECT_EQ(env.trigger_prob(s, mu, 0), 0.0);
    EXPECT_EQ(env.trigger_prob(Action{2, 0}, mu, 2), 1.0);
}

TEST(TriggerProb, SingleTriggerMultiplicity) {
    const SingleTriggerEnvironment env(single({0.5, 0.4, 0.3, 0.2, 0.1, 0.6}, 5, 1.0));
    const MeanVector& mu = env.spec().mean;
    const Action s{0, 0, 0, 0, 3};
    EXPECT_DOUBLE_EQ(env.trigger_prob(s, mu, 3), 0.2);
    EXPECT_DOUBLE_EQ(env.trigger_prob(s, mu, 0), 0.8);
    EXPECT_EQ(env.trigger_prob(s, mu, 1), 0.0);
}

TEST(TriggerProb, MatchesEmpiricalFrequency) {
    const std::vector<double> v{0.3, 0.5, 0.2, 0.6};
    const CascadeEnvironment env(cascade(v, 3));
    const MeanVector mu(v);
    const Action a{2, 0, 3};
    RngStream outcomes(5), trig(6);
    const int n = 100'000;
    std::vector<int> hits(4, 0);
    for (int t = 0; t < n; ++t) {
        const auto x = sample_outcomes(outcomes, mu);
        for (const auto& o : env.trigger(a, x, trig)) ++hits[o.arm];
    }
    for (ArmIndex i = 0; i < 4; ++i) {
        const double p = env.trigger_prob(a, mu, i);
        const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / n);
        EXPECT_NEAR(hits[i] / double(n), p, 4 * se) << "arm " << i;
    }
}

TEST(CascadeReward, RealizedConvergesToExpected) {
    const std::vector<double> v{0.1, 0.2, 0.15, 0.05, 0.3};
    const CascadeEnvironment env(cascade(v, 3));
    const MeanVector mu(v);
    const Action a{4, 1, 2};
    RngStream outcomes(8), trig(9);
    double sum = 0;
    const int n = 100'000;
    for (int t = 0; t < n; ++t) {
        const auto x = sample_outcomes(outcomes, mu);
        sum += env.realized_reward(a, env.trigger(a, x, trig));
    }
    EXPECT_NEAR(sum / n, env.expected_reward(a, mu), 0.01);
}

TEST(SingleTrigger, DegenerateRewards) {
    RngStream r(10);
    for (int i = 0; i < 1000; ++i) {
        const auto ones = single_trigger_step(r, Action{0, 1, 1}, MeanVector({1.0, 1.0}), 2.5);
        EXPECT_EQ(ones.reward, 2.5);
        ASSERT_EQ(ones.outcome.size(), 1u);
        const auto zeros = single_trigger_step(r, Action{0, 1, 1}, MeanVector({0.0, 0.0}), 2.5);
        EXPECT_EQ(zeros.reward, 0.0);
    }
}

TEST(SingleTrigger, MeanRewardIsScaledAverage) {
    RngStream r(11);
    const double b = 3.0;
    const int n = 100'000;
    double sum = 0;
    for (int i = 0; i < n; ++i) sum += single_trigger_step(r, Action{0, 1}, MeanVector({1.0, 0.0}), b).reward;
    EXPECT_NEAR(sum / n, b / 2, 0.01 * b);
    const SingleTriggerEnvironment env(single({1.0, 0.0}, 2, b));
    EXPECT_DOUBLE_EQ(env.expected_reward(Action{0, 1}, env.spec().mean), b / 2);
}

TEST(EnvSpec, Validation) {
    EXPECT_THROW(cascade({0.1, 0.2}, 3).validate(), ShapeError);
    EXPECT_THROW(cascade({0.1, 0.2}, 0).validate(), ShapeError);
    auto s = single({0.1, 0.2}, 3, 1.0);
    EXPECT_NO_THROW(s.validate());  // multisets may exceed m
    s.reward_scale = 0.0;
    EXPECT_THROW(s.validate(), DomainError);
    EXPECT_THROW(env_model_from_string("bandit"), ConfigError);
    EXPECT_EQ(env_model_from_string("single-trigger"), EnvModel::SingleTrigger);
}

TEST(Environment, ActionValidation) {
    const CascadeEnvironment env(cascade({0.1, 0.2, 0.3}, 2));
    EXPECT_THROW(env.validate_action(Action{0, 0}), InvalidAction);
    EXPECT_THROW(env.validate_action(Action{0}), InvalidAction);
    EXPECT_THROW(env.validate_action(Action{0, 5}), InvalidAction);
    EXPECT_NO_THROW(env.validate_action(Action{2, 0}));
    const SingleTriggerEnvironment st(single({0.1, 0.2}, 3, 1.0));
    EXPECT_NO_THROW(st.validate_action(Action{0, 0, 1}));
    EXPECT_THROW(st.validate_action(Action{0, 1}), InvalidAction);
}

TEST(Environment, EnumerationCounts) {
    const CascadeEnvironment env(cascade(std::vector<double>(6, 0.1), 3));
    EXPECT_EQ(env.action_count(), 20u);
    const auto all = env.enumerate_actions(100);
    EXPECT_EQ(all.size(), 20u);
    EXPECT_EQ(all.front(), (Action{0, 1, 2}));
    EXPECT_EQ(all.back(), (Action{3, 4, 5}));
    EXPECT_THROW(env.enumerate_actions(19), TooLarge);

    const SingleTriggerEnvironment st(single(std::vector<double>(4, 0.1), 3, 1.0));
    EXPECT_EQ(st.action_count(), 20u);  // C(4+3-1, 3)
    EXPECT_EQ(st.enumerate_actions(100).size(), 20u);
}

TEST(Conditions, MonotonicityAndTpm) {
    RngStream r(12);
    const auto c = make_environment(cascade({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.05}, 5));
    const auto s = make_environment(single({0.1, 0.7, 0.3, 0.4}, 3, 2.0));
    EXPECT_TRUE(check_monotonicity(*c, 10'000, r).passed());
    EXPECT_TRUE(check_monotonicity(*s, 10'000, r).passed());
    const auto tc = check_tpm(*c, 1.0, 10'000, r);
    EXPECT_TRUE(tc.passed());
    EXPECT_LE(tc.worst, 1.0 + 1e-12);
    const auto ts = check_tpm(*s, 2.0, 10'000, r);
    EXPECT_TRUE(ts.passed());
    // The single-trigger reward is linear, so the smoothness inequality is tight.
    EXPECT_NEAR(ts.worst, 1.0, 1e-9);
    // A too-small constant is caught.
    EXPECT_FALSE(check_tpm(*s, 1.0, 1000, r).passed());
    EXPECT_THROW(check_tpm(*s, 0.0, 10, r), DomainError);
}

TEST(Conditions, Identifiability) {
    RngStream r(13);
    const auto c = make_environment(cascade({0.3, 0.5, 0.2, 0.6}, 2));
    const auto rep = check_identifiability(*c, uniform_random_policy(*c), 100'000, r);
    EXPECT_TRUE(rep.passed());
    for (const auto& a : rep.arms) EXPECT_FALSE(a.inconclusive);

    const auto s = make_environment(single({0.7, 0.4, 0.5, 0.2}, 2, 1.0));
    EXPECT_TRUE(check_identifiability(*s, uniform_random_policy(*s), 100'000, r).passed());

    const auto det = make_environment(cascade({0.0, 1.0, 0.0}, 2));
    const auto exact = check_identifiability(*det, uniform_random_policy(*det), 5000, r);
    for (const auto& a : exact.arms) {
        if (!a.inconclusive) {
            EXPECT_EQ(a.observed_mean, a.true_mean);
        }
    }
}

TEST(Conditions, IdentifiabilityInconclusiveDoesNotFail) {
    RngStream r(14);
    const auto c = make_environment(cascade({0.3, 0.5, 0.2, 0.6}, 2));
    // A policy that never shows arm 3 leaves it inconclusive.
    const ActionPolicy fixed = [](RngStream&) { return Action{0, 1}; };
    const auto rep = check_identifiability(*c, fixed, 10'000, r);
    EXPECT_TRUE(rep.arms[3].inconclusive);
    EXPECT_TRUE(rep.passed());
}
