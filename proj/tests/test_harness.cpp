#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hcmab/errors.hpp"
#include "hcmab/harness.hpp"
#include "hcmab/oracle.hpp"
#include "hcmab/text.hpp"

using namespace hcmab;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.horizon = 300;
    cfg.replications = 5;
    cfg.offline_samples = 20;
    cfg.seed = 99;
    return cfg;
}

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("hcmab_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Config, DefaultsMatchProtocol) {
    const ExperimentConfig cfg;
    EXPECT_EQ(cfg.arms, 10u);
    EXPECT_EQ(cfg.action_size, 5u);
    EXPECT_EQ(cfg.replications, 20u);
    EXPECT_EQ(cfg.horizon, 5000u);
    EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, RoundTrip) {
    ExperimentConfig a;
    EXPECT_EQ(parse_config(emit_config(a)), a);

    ExperimentConfig b;
    b.env = EnvModel::SingleTrigger;
    b.arms = 6;
    b.action_size = 8;
    b.horizon = 123;
    b.offline_samples = 0;
    b.bias_mode = BiasMode::SignedV;
    b.bias = 0.1 + 0.2;  // not exactly representable as written
    b.algorithms = {PolicyKind::ClcbFixed, PolicyKind::HybridCucb};
    b.replications = 3;
    b.seed = 18446744073709551615ULL;
    b.clcb_delta = 0.05;
    b.reward_scale = 2.5;
    b.output_dir = "out/dir with spaces";
    b.episode_logs = true;
    EXPECT_EQ(parse_config(emit_config(b)), b);
}

TEST(Config, ParseErrors) {
    const std::string head = std::string("schema = ") + std::string(kConfigSchema) + "\n";
    EXPECT_THROW(parse_config("m = 10\n"), ParseError);
    EXPECT_THROW(parse_config("schema = other/2\n"), ParseError);
    EXPECT_THROW(parse_config(head + "mm = 10\n"), ParseError);
    EXPECT_THROW(parse_config(head + "m = 10\nm = 11\n"), ParseError);
    EXPECT_THROW(parse_config(head + "horizon = soon\n"), ParseError);
    EXPECT_THROW(parse_config(head + "novalue\n"), ParseError);
    EXPECT_THROW(parse_config(""), ParseError);
    try {
        parse_config(head + "# comment\nm = 10\nbogus = 1\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4u);
    }
}

TEST(Config, ValidationErrors) {
    const std::string head = std::string("schema = ") + std::string(kConfigSchema) + "\n";
    EXPECT_THROW(parse_config(head + "bias_mode = signed-v\n"), ConfigError);  // V missing
    EXPECT_THROW(parse_config(head + "bias_mode = signed-v\nbias = 0.45\n"), ConfigError);
    EXPECT_THROW(parse_config(head + "bias = 0.2\n"), ConfigError);
    EXPECT_THROW(parse_config(head + "k = 11\n"), ConfigError);
    EXPECT_THROW(parse_config(head + "horizon = 0\n"), ConfigError);
    EXPECT_THROW(parse_config(head + "algorithms = cucb,cucb\n"), ConfigError);
    EXPECT_THROW(parse_config(head + "clcb_delta = 1\n"), ConfigError);
    EXPECT_NO_THROW(parse_config(head + "bias = 0\n"));
    EXPECT_THROW(load_config("/nonexistent/path.conf"), IoError);
}

TEST(Instance, Unbiased) {
    RngStream r(1);
    const auto inst = generate_instance(ExperimentConfig{}, r);
    EXPECT_TRUE(validate_bias(inst.mu_off, inst.mu_on, BiasVector::uniform(10, 0)).empty());
    for (double x : inst.mu_on.values()) {
        EXPECT_GT(x, 0.0);
        EXPECT_LT(x, 0.5);
    }
    EXPECT_EQ(inst.mu_on, inst.mu_off);
}

TEST(Instance, SignedBias) {
    ExperimentConfig cfg;
    cfg.bias_mode = BiasMode::SignedV;
    cfg.bias = 0.4;
    RngStream r(2);
    const auto inst = generate_instance(cfg, r);
    bool saw_pos = false, saw_neg = false;
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_NEAR(std::abs(inst.mu_off[i] - inst.mu_on[i]), 0.4, 1e-12);
        EXPECT_GE(inst.mu_on[i], 0.4);
        EXPECT_LE(inst.mu_on[i], 0.5);
        const double w = omega(inst.bias[i], inst.mu_off[i], inst.mu_on[i], i);
        EXPECT_TRUE(std::abs(w) < 1e-12 || std::abs(w - 0.8) < 1e-12) << w;
        saw_pos |= inst.signed_bias[i] > 0;
        saw_neg |= inst.signed_bias[i] < 0;
    }
    EXPECT_TRUE(saw_pos && saw_neg);
}

TEST(Instance, Deterministic) {
    RngStream a(7), b(7);
    EXPECT_EQ(generate_instance(ExperimentConfig{}, a).mu_on, generate_instance(ExperimentConfig{}, b).mu_on);
}

TEST(OfflineData, Generation) {
    RngStream r(3);
    const auto empty = generate_offline_data(MeanVector({0.2, 0.3}), 0, r);
    EXPECT_EQ(empty.count(0), 0u);
    EXPECT_FALSE(empty.mean(1).has_value());

    int within = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto d = generate_offline_data(MeanVector({0.45}), 200, r);
        EXPECT_EQ(d.count(0), 200u);
        within += std::abs(*d.mean(0) - 0.45) <= 0.15;
    }
    EXPECT_GE(within, 198);

    RngStream x(4), y(4);
    EXPECT_EQ(generate_offline_data(MeanVector({0.3, 0.6}), 50, x), generate_offline_data(MeanVector({0.3, 0.6}), 50, y));
}

TEST(OfflineData, TextRoundTrip) {
    const OfflineDataset d({{1.0, 0.0, 0.25}, {}, {0.125}});
    std::stringstream ss;
    write_offline_dataset(ss, d);
    EXPECT_EQ(ss.str(), "arm_count=3\n0: 1 0 0.25\n1:\n2: 0.125\n");
    EXPECT_EQ(read_offline_dataset(ss), d);

    const auto dir = scratch_dir("dataset");
    fs::create_directories(dir);
    save_offline_dataset(dir / "d.txt", d);
    EXPECT_EQ(load_offline_dataset(dir / "d.txt"), d);
    EXPECT_THROW(load_offline_dataset(dir / "missing.txt"), IoError);
}

TEST(OfflineData, MalformedFiles) {
    auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return read_offline_dataset(in);
    };
    EXPECT_THROW(parse(""), ParseError);
    EXPECT_THROW(parse("arms=2\n"), ParseError);
    EXPECT_THROW(parse("arm_count=2\n0: 1\n"), ParseError);
    EXPECT_THROW(parse("arm_count=2\n1: 1\n0: 1\n"), ParseError);
    EXPECT_THROW(parse("arm_count=1\n0: 1.5\n"), ParseError);
    EXPECT_THROW(parse("arm_count=1\n0: x\n"), ParseError);
    EXPECT_THROW(parse("arm_count=1\n0 1\n"), ParseError);
}

TEST(Experiment, ShapesAndCsv) {
    const auto cfg = small_config();
    const auto res = run_experiment(cfg);
    ASSERT_EQ(res.series.size(), 3u);
    for (const auto& s : res.series) {
        EXPECT_EQ(s.mean.size(), cfg.horizon);
        EXPECT_EQ(s.per_replication.size(), cfg.replications);
    }
    const auto csv = format_results_csv(res);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "round,algorithm,mean_cum_regret,stderr,replications");
    EXPECT_EQ(count_lines(csv), 1 + cfg.horizon * 3);
}

TEST(Experiment, HorizonOne) {
    auto cfg = small_config();
    cfg.horizon = 1;
    const auto res = run_experiment(cfg);
    for (const auto& s : res.series) EXPECT_EQ(s.mean.size(), 1u);
}

TEST(Experiment, AggregationMatchesRawSeries) {
    const auto res = run_experiment(small_config());
    for (const auto& s : res.series) {
        const double n = static_cast<double>(s.per_replication.size());
        for (std::size_t t = 0; t < s.mean.size(); t += 37) {
            double sum = 0;
            for (const auto& rep : s.per_replication) sum += rep[t];
            const double mean = sum / n;
            double ss = 0;
            for (const auto& rep : s.per_replication) ss += (rep[t] - mean) * (rep[t] - mean);
            const double se = std::sqrt(ss / (n - 1)) / std::sqrt(n);
            EXPECT_NEAR(s.mean[t], mean, 1e-12);
            EXPECT_NEAR(s.standard_error[t], se, 1e-12);
        }
    }
}

TEST(Experiment, RegretNondecreasingUnderExactOracle) {
    const auto res = run_experiment(small_config());
    for (const auto& s : res.series)
        for (const auto& rep : s.per_replication)
            for (std::size_t t = 1; t < rep.size(); ++t) ASSERT_GE(rep[t], rep[t - 1] - 1e-12);
}

TEST(Experiment, DeterministicAcrossThreadCounts) {
    const auto cfg = small_config();
    const auto a = format_results_csv(run_experiment(cfg, {1, std::nullopt}));
    const auto b = format_results_csv(run_experiment(cfg, {4, std::nullopt}));
    EXPECT_EQ(a, b);
}

TEST(Experiment, PairedInstances) {
    // Every algorithm in a replication sees the same instance, so the optimal
    // value and the first forced outcomes agree.
    const auto cfg = small_config();
    const auto setup = prepare_replication(cfg, 2);
    const auto h = run_replication_policy(cfg, setup, PolicyKind::HybridCucb);
    const auto c = run_replication_policy(cfg, setup, PolicyKind::Cucb);
    std::size_t agree = 0;
    for (std::size_t t = 0; t < h.size(); ++t) {
        if (h[t].action == c[t].action) {
            ++agree;
            ASSERT_EQ(h[t].triggered, c[t].triggered);
        }
    }
    EXPECT_GT(agree, 0u);
}

TEST(Experiment, CumulativeRegretRejectsNegativeGap) {
    const auto env = make_environment(EnvSpec{EnvModel::Cascade, 3, 1, MeanVector({0.5, 0.4, 0.3}), 1.0});
    RoundLog log;
    log.action = {0};
    EXPECT_THROW(cumulative_regret({log}, *env, 0.1), DomainError);
    EXPECT_NEAR(cumulative_regret({log, log}, *env, 0.5)[1], 0.0, 1e-15);
}

TEST(Experiment, EmitWritesArtifacts) {
    const auto res = run_experiment(small_config());
    const auto dir = scratch_dir("emit");
    emit_results(res, dir);
    for (const char* f : {"regret.csv", "regret.svg", "manifest.txt"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
    std::ifstream svg(dir / "regret.svg");
    std::string first;
    std::getline(svg, first);
    EXPECT_NE(first.find("<svg"), std::string::npos);

    // The manifest is itself a valid config reproducing the run.
    const auto replay = load_config(dir / "manifest.txt");
    EXPECT_EQ(replay, res.config);
    EXPECT_EQ(format_results_csv(run_experiment(replay)), format_results_csv(res));

    // A regular file where the directory should be.
    const auto blocker = scratch_dir("blocked");
    { std::ofstream(blocker) << "x"; }
    EXPECT_THROW(emit_results(res, blocker / "sub"), IoError);
    fs::remove(blocker);
}

TEST(Experiment, EpisodeLogs) {
    auto cfg = small_config();
    cfg.replications = 2;
    cfg.horizon = 10;
    cfg.episode_logs = true;
    const auto dir = scratch_dir("logs");
    run_experiment(cfg, {1, dir});
    std::ifstream in(dir / "hybrid-cucb_rep1.tsv");
    ASSERT_TRUE(in.good());
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, round_log_header());
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    EXPECT_EQ(rows, 10u);
}

TEST(Experiment, SingleTriggerConfig) {
    auto cfg = small_config();
    cfg.env = EnvModel::SingleTrigger;
    cfg.arms = 4;
    cfg.action_size = 3;
    cfg.reward_scale = 2.0;
    const auto res = run_experiment(cfg);
    for (const auto& s : res.series) EXPECT_GE(s.final_mean(), 0.0);
}
