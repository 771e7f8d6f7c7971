#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hcmab/algorithms.hpp"
#include "hcmab/core.hpp"
#include "hcmab/env.hpp"
#include "hcmab/rng.hpp"

namespace hcmab {

inline constexpr std::string_view kConfigSchema = "hcmab-experiment/1";
inline constexpr std::string_view kCodeVersion = "0.1.0";

enum class BiasMode { Unbiased, SignedV };

const char* to_string(BiasMode mode);
BiasMode bias_mode_from_string(const std::string& name);

struct ExperimentConfig {
    EnvModel env = EnvModel::Cascade;
    std::size_t arms = 10;
    std::size_t action_size = 5;
    std::uint64_t horizon = 5000;
    Count offline_samples = 200;
    BiasMode bias_mode = BiasMode::Unbiased;
    std::optional<double> bias;  // required in signed-v mode
    std::vector<PolicyKind> algorithms{PolicyKind::HybridCucb, PolicyKind::Cucb, PolicyKind::ClcbFixed};
    std::uint64_t replications = 20;
    std::uint64_t seed = 1;
    double clcb_delta = kDefaultClcbDelta;
    double reward_scale = 1.0;
    std::string output_dir = "results";
    bool episode_logs = false;

    /// Bias level used by the algorithms (0 in unbiased mode).
    double bias_level() const { return bias_mode == BiasMode::Unbiased ? 0.0 : bias.value_or(0.0); }

    void validate() const;
    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Flat `key = value` text. The first setting must be `schema`; unknown keys,
/// duplicates and malformed values are errors.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string emit_config(const ExperimentConfig& cfg);

/// Applies one `key = value` setting to an existing config (no validation).
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);

struct GeneratedInstance {
    MeanVector mu_on;
    MeanVector mu_off;
    BiasVector bias;                 // |V_i|, handed to the algorithms
    std::vector<double> signed_bias;  // mu_off - mu_on as generated
};

/// Unbiased: mu_on ~ U(0, 0.5), mu_off = mu_on, V = 0. Signed-V: mu_on ~ U(0.4, 0.5),
/// V_i = +V or -V with probability 1/2 each, mu_off = mu_on + V_i.
GeneratedInstance generate_instance(const ExperimentConfig& cfg, RngStream& rng);

/// N i.i.d. Bernoulli(mu_off_i) samples per arm.
OfflineDataset generate_offline_data(const MeanVector& mu_off, Count samples, RngStream& rng);

void write_offline_dataset(std::ostream& out, const OfflineDataset& data);
OfflineDataset read_offline_dataset(std::istream& in);
void save_offline_dataset(const std::filesystem::path& path, const OfflineDataset& data);
OfflineDataset load_offline_dataset(const std::filesystem::path& path);

struct ReplicationSetup {
    std::uint64_t replication = 0;
    GeneratedInstance instance;
    EnvSpec env;
    OfflineDataset data;
};

ReplicationSetup prepare_replication(const ExperimentConfig& cfg, std::uint64_t replication);

/// One policy's episode on a prepared replication. Every policy of the same
/// replication sees the same outcome and trigger streams.
std::vector<RoundLog> run_replication_policy(const ExperimentConfig& cfg,
                                             const ReplicationSetup& setup, PolicyKind policy);

struct RegretSeries {
    PolicyKind algorithm = PolicyKind::HybridCucb;
    std::vector<std::vector<double>> per_replication;  // cumulative regret by round
    std::vector<double> mean;
    std::vector<double> standard_error;  // stddev / sqrt(replications)

    /// Recomputes mean and stderr from per_replication.
    void aggregate();
    double final_mean() const { return mean.empty() ? 0.0 : mean.back(); }
    double final_stderr() const { return standard_error.empty() ? 0.0 : standard_error.back(); }
};

struct ReplicationRecord {
    GeneratedInstance instance;
    std::vector<Count> offline_counts;
    double opt = 0.0;
    std::uint64_t instance_seed = 0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<RegretSeries> series;
    std::vector<ReplicationRecord> replications;
};

struct RunOptions {
    unsigned parallel = 1;
    std::optional<std::filesystem::path> log_dir;  // used when config.episode_logs is set
};

/// Cumulative (1,1)-regret after each round: t * opt - sum of expected rewards.
std::vector<double> cumulative_regret(const std::vector<RoundLog>& logs, const Environment& env,
                                      double opt);

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

std::string format_results_csv(const ExperimentResult& result);
std::string render_svg(const ExperimentResult& result);
std::string format_manifest(const ExperimentResult& result);

/// Writes regret.csv, regret.svg and manifest.txt into `dir` (created if needed).
void emit_results(const ExperimentResult& result, const std::filesystem::path& dir);

}  // namespace hcmab
