#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "hcmab/algorithms.hpp"
#include "hcmab/errors.hpp"
#include "hcmab/harness.hpp"

using namespace hcmab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

EpisodeStreams streams(std::uint64_t seed, std::uint64_t rep = 0) {
    return {RngStream(seed, rep, StreamPurpose::Outcomes), RngStream(seed, rep, StreamPurpose::Trigger)};
}

std::unique_ptr<Environment> m10k5(std::uint64_t seed) {
    RngStream r(seed);
    std::vector<double> v(10);
    for (auto& x : v) x = r.uniform_open(0.0, 0.5);
    return make_environment(EnvSpec{EnvModel::Cascade, 10, 5, MeanVector(v), 1.0});
}

OfflineDataset data_for(const MeanVector& mu, Count n, std::uint64_t seed) {
    RngStream r(seed);
    return generate_offline_data(mu, n, r);
}

}  // namespace

TEST(Radius, Online) {
    EXPECT_EQ(rad_online(1, 10, 0), kInf);
    EXPECT_NEAR(rad_online(1, 10, 2), std::sqrt(std::log(40.0)), 1e-12);
    EXPECT_NEAR(rad_online(1, 10, 2), 1.9206, 1e-4);
    double prev = kInf;
    for (Count n = 1; n < 1000; ++n) {
        const double r = rad_online(50, 10, n);
        EXPECT_LT(r, prev);
        prev = r;
    }
    EXPECT_THROW(rad_online(0, 10, 1), DomainError);
}

TEST(Radius, Hybrid) {
    EXPECT_EQ(rad_hybrid(1, 10, 0, 0, 0.3), kInf);
    const double expected = std::sqrt(2 * std::log(40.0) / 4) + 0.1;
    EXPECT_NEAR(rad_hybrid(1, 10, 4, 0, 0.1), expected, 1e-12);
    EXPECT_NEAR(rad_hybrid(1, 10, 4, 0, 0.1), 1.4581, 1e-4);
    for (Count n : {1u, 7u, 300u}) EXPECT_DOUBLE_EQ(rad_hybrid(9, 10, n, 0, 0.0), rad_online(9, 10, n));
}

TEST(Radius, MonotoneTrust) {
    for (Count online : {0u, 5u, 50u}) {
        double prev_rad = kInf, prev_bias_term = -1;
        for (Count n = 1; n < 500; ++n) {
            const double r0 = rad_hybrid(20, 10, n, online, 0.0);
            EXPECT_LE(r0, prev_rad);
            prev_rad = r0;
            const double term = rad_hybrid(20, 10, n, online, 0.2) - r0;
            EXPECT_GE(term, prev_bias_term - 1e-15);
            prev_bias_term = term;
        }
    }
}

TEST(MuBar, Examples) {
    ArmState empty;
    EXPECT_EQ(hybrid_mu_bar(empty, 1, 10), 1.0);

    ArmState warm;
    warm.offline_count = 4;
    warm.offline_mean = 0.5;
    warm.bias_bound = 0.1;
    const auto b = hybrid_bounds(warm, 1, 10);
    EXPECT_EQ(b.ucb, kInf);
    EXPECT_NEAR(b.ucb_hybrid, 0.5 + 1.4581, 1e-4);
    EXPECT_EQ(b.mu_bar, 1.0);

    ArmState big;
    big.offline_count = 1'000'000;
    big.offline_mean = 0.3;
    const double mu = hybrid_mu_bar(big, 1, 10);
    EXPECT_NEAR(mu, 0.3 + std::sqrt(2 * std::log(40.0) / 1e6), 1e-12);
    EXPECT_NEAR(mu, 0.3027, 1e-4);
}

TEST(MuBar, WeightedMean) {
    ArmState s;
    s.offline_count = 30;
    s.offline_mean = 0.2;
    s.trigger_count = 10;
    s.online_mean = 0.6;
    s.online_sum = 6.0;
    s.bias_bound = 0.05;
    const auto b = hybrid_bounds(s, 100, 10);
    const double l = std::log(4.0 * 10 * 1e6);
    EXPECT_NEAR(b.ucb, 0.6 + std::sqrt(2 * l / 10), 1e-12);
    EXPECT_NEAR(b.ucb_hybrid, (30 * 0.2 + 10 * 0.6) / 40 + std::sqrt(2 * l / 40) + 30.0 / 40 * 0.05, 1e-12);
    EXPECT_EQ(b.mu_bar, std::min({b.ucb, b.ucb_hybrid, 1.0}));
    const auto o = online_bounds(s, 100, 10);
    EXPECT_EQ(o.ucb, b.ucb);
    EXPECT_EQ(o.ucb_hybrid, kInf);
}

TEST(Rounds, ColdStartPicksFirstArms) {
    const auto env = m10k5(1);
    const auto oracle = make_exact_oracle(*env);
    auto state = make_policy_state({PolicyKind::HybridCucb}, OfflineDataset::empty(10), BiasVector::uniform(10, 0), *oracle);
    auto s = streams(3);
    const auto log = hybrid_cucb_round(state, *env, *oracle, s);
    EXPECT_EQ(log.t, 1u);
    EXPECT_EQ(log.action, (Action{0, 1, 2, 3, 4}));
    for (double m : log.mu_bar) EXPECT_EQ(m, 1.0);
    EXPECT_EQ(state.t, 2u);

    auto cstate = make_policy_state({PolicyKind::Cucb}, OfflineDataset::empty(10), BiasVector::uniform(10, 0), *oracle);
    auto s2 = streams(3);
    EXPECT_EQ(cucb_round(cstate, *env, *oracle, s2).action, (Action{0, 1, 2, 3, 4}));
}

TEST(Rounds, HugeUnbiasedDataPlaysOptimum) {
    const auto env = m10k5(2);
    const auto oracle = make_exact_oracle(*env);
    const auto data = data_for(env->spec().mean, 0, 1);
    // Offline means equal to the truth, as if N were unbounded.
    std::vector<std::vector<double>> samples(10);
    for (std::size_t i = 0; i < 10; ++i) samples[i].assign(2'000'000, env->spec().mean[i]);
    const OfflineDataset exact(std::move(samples));
    const auto logs = run_episode({PolicyKind::HybridCucb}, exact, BiasVector::uniform(10, 0), *env, *oracle, 1, streams(4));
    const auto opt = compute_opt(*env, env->spec().mean);
    EXPECT_NEAR(env->expected_reward(logs[0].action, env->spec().mean), opt.opt, 1e-15);
}

TEST(Rounds, LoggedBoundsAreConsistent) {
    const auto env = m10k5(3);
    const auto oracle = make_exact_oracle(*env);
    const auto data = data_for(env->spec().mean, 50, 2);
    const auto logs = run_episode({PolicyKind::HybridCucb}, data, BiasVector::uniform(10, 0), *env, *oracle, 2000, streams(5));
    ASSERT_EQ(logs.size(), 2000u);
    for (const auto& log : logs) {
        for (std::size_t i = 0; i < 10; ++i) {
            const auto& b = log.bounds[i];
            ASSERT_EQ(log.mu_bar[i], std::min({b.ucb, b.ucb_hybrid, 1.0}));
            ASSERT_LE(log.mu_bar[i], 1.0);
        }
    }
}

TEST(Rounds, NoOfflineDataEquivalence) {
    const auto env = m10k5(4);
    const auto oracle = make_exact_oracle(*env);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto h = run_episode({PolicyKind::HybridCucb}, OfflineDataset::empty(10), BiasVector::uniform(10, 0.3), *env, *oracle, 1500, streams(seed));
        const auto c = run_episode({PolicyKind::Cucb}, OfflineDataset::empty(10), BiasVector::uniform(10, 0.3), *env, *oracle, 1500, streams(seed));
        for (std::size_t t = 0; t < h.size(); ++t) {
            ASSERT_EQ(h[t].action, c[t].action);
            ASSERT_EQ(h[t].mu_bar, c[t].mu_bar);
            ASSERT_EQ(h[t].triggered, c[t].triggered);
        }
    }
}

TEST(Rounds, StateMeansMatchTriggeredHistory) {
    const auto env = m10k5(5);
    const auto oracle = make_exact_oracle(*env);
    auto state = make_policy_state({PolicyKind::Cucb}, OfflineDataset::empty(10), BiasVector::uniform(10, 0), *oracle);
    auto s = streams(9);
    std::vector<double> sum(10, 0.0);
    std::vector<Count> n(10, 0);
    for (int t = 0; t < 500; ++t) {
        const auto log = policy_round(state, *env, *oracle, s);
        for (const auto& o : log.triggered) {
            sum[o.arm] += o.value;
            ++n[o.arm];
        }
    }
    EXPECT_EQ(state.t, 501u);
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_EQ(state.arms[i].trigger_count, n[i]);
        if (n[i]) {
            EXPECT_NEAR(state.arms[i].online_mean, sum[i] / static_cast<double>(n[i]), 1e-12);
        }
    }
}

TEST(Clcb, Examples) {
    const TopKOracle oracle(2);
    EXPECT_EQ(clcb_select(OfflineDataset::empty(4), oracle, 0.01), (Action{0, 1}));

    // Exact-valued data of size 10^6: LCB sits just below the truth.
    std::vector<std::vector<double>> samples{std::vector<double>(1'000'000, 0.1), std::vector<double>(1'000'000, 0.4),
                                             std::vector<double>(1'000'000, 0.3), std::vector<double>(1'000'000, 0.2)};
    EXPECT_EQ(clcb_select(OfflineDataset(samples), oracle, 0.01), (Action{1, 2}));

    // Arm 0 unobserved; the others well above their radius.
    std::vector<std::vector<double>> partial{{}, std::vector<double>(10'000, 0.5), std::vector<double>(10'000, 0.6),
                                             std::vector<double>(10'000, 0.4)};
    const auto a = clcb_select(OfflineDataset(partial), oracle, 0.01);
    EXPECT_EQ(a, (Action{2, 1}));
    EXPECT_THROW(clcb_select(OfflineDataset::empty(4), oracle, 0.0), DomainError);
    EXPECT_THROW(clcb_select(OfflineDataset::empty(4), oracle, 1.0), DomainError);
}

TEST(Episode, HorizonAndDeterminism) {
    const auto env = m10k5(6);
    const auto oracle = make_exact_oracle(*env);
    const auto data = data_for(env->spec().mean, 20, 3);
    EXPECT_EQ(run_episode({PolicyKind::HybridCucb}, data, BiasVector::uniform(10, 0), *env, *oracle, 1, streams(1)).size(), 1u);
    EXPECT_THROW(run_episode({PolicyKind::HybridCucb}, data, BiasVector::uniform(10, 0), *env, *oracle, 0, streams(1)), DomainError);

    const auto a = run_episode({PolicyKind::HybridCucb}, data, BiasVector::uniform(10, 0), *env, *oracle, 300, streams(2));
    const auto b = run_episode({PolicyKind::HybridCucb}, data, BiasVector::uniform(10, 0), *env, *oracle, 300, streams(2));
    for (std::size_t t = 0; t < a.size(); ++t) ASSERT_EQ(format_round_log(a[t]), format_round_log(b[t]));

    const auto c = run_episode({PolicyKind::ClcbFixed}, data, BiasVector::uniform(10, 0), *env, *oracle, 300, streams(2));
    for (const auto& log : c) ASSERT_EQ(log.action, c.front().action);
}

TEST(Episode, RoundLogFormat) {
    RoundLog log;
    log.t = 3;
    log.action = {1, 0};
    log.mu_bar = {1.0, 0.5};
    log.bounds = {ArmBounds{kInf, kInf, kInf, kInf, 1.0}, ArmBounds{0.1, 0.2, 0.6, 0.5, 0.5}};
    log.triggered = {{1, 0.0}, {0, 1.0}};
    log.realized_reward = 1.0;
    EXPECT_EQ(format_round_log(log), "3\t1,0\t1,0.5\tinf,0.6\tinf,0.5\t1:0,0:1\t1");
    EXPECT_EQ(round_log_header(), "t\taction\tmu_bar\tucb\tucb_hybrid\ttriggered\trealized_reward");
}

TEST(Policy, Names) {
    EXPECT_EQ(policy_kind_from_string("hybrid-cucb"), PolicyKind::HybridCucb);
    EXPECT_EQ(policy_kind_from_string("clcb-fixed"), PolicyKind::ClcbFixed);
    EXPECT_EQ(policy_kind_from_string("clcb"), PolicyKind::ClcbFixed);
    EXPECT_THROW(policy_kind_from_string("ts"), ConfigError);
}
