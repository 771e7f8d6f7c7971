#include "hcmab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "hcmab/errors.hpp"
#include "hcmab/oracle.hpp"
#include "hcmab/text.hpp"

namespace hcmab {

namespace fs = std::filesystem;

// ----------------------------------------------------------------- config

const char* to_string(BiasMode mode) {
    switch (mode) {
        case BiasMode::Unbiased: return "unbiased";
        case BiasMode::SignedV: return "signed-v";
    }
    return "?";
}

BiasMode bias_mode_from_string(const std::string& name) {
    if (name == "unbiased") return BiasMode::Unbiased;
    if (name == "signed-v") return BiasMode::SignedV;
    throw ConfigError("unknown bias mode '" + name + "'");
}

void ExperimentConfig::validate() const {
    if (arms == 0) throw ConfigError("m must be at least 1");
    if (action_size == 0) throw ConfigError("k must be at least 1");
    if (env == EnvModel::Cascade && action_size > arms) throw ConfigError("k must not exceed m");
    if (horizon == 0) throw ConfigError("horizon must be at least 1");
    if (replications == 0) throw ConfigError("replications must be at least 1");
    if (algorithms.empty()) throw ConfigError("at least one algorithm is required");
    if (!(clcb_delta > 0.0 && clcb_delta < 1.0)) throw ConfigError("clcb_delta must lie in (0,1)");
    if (!(reward_scale > 0.0) || !std::isfinite(reward_scale))
        throw ConfigError("reward_scale must be positive");
    if (bias_mode == BiasMode::SignedV) {
        if (!bias) throw ConfigError("signed-v mode needs an explicit bias level V");
        if (!(*bias >= 0.0)) throw ConfigError("bias must be nonnegative");
        // mu_on is drawn from (0.4, 0.5), so mu_on - V stays in [0,1] only for V <= 0.4.
        if (*bias > 0.4) throw ConfigError("bias above 0.4 would push offline means outside [0,1]");
    } else if (bias && *bias != 0.0) {
        throw ConfigError("unbiased mode requires bias = 0");
    }
    std::set<PolicyKind> seen(algorithms.begin(), algorithms.end());
    if (seen.size() != algorithms.size()) throw ConfigError("algorithm listed twice");
}

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view raw) {
    const std::string value(text::trim(raw));
    try {
        if (key == "env") cfg.env = env_model_from_string(value);
        else if (key == "m") cfg.arms = static_cast<std::size_t>(text::parse_u64(value));
        else if (key == "k") cfg.action_size = static_cast<std::size_t>(text::parse_u64(value));
        else if (key == "horizon") cfg.horizon = text::parse_u64(value);
        else if (key == "offline_samples") cfg.offline_samples = text::parse_u64(value);
        else if (key == "bias_mode") cfg.bias_mode = bias_mode_from_string(value);
        else if (key == "bias") cfg.bias = text::parse_double(value);
        else if (key == "algorithms") {
            cfg.algorithms.clear();
            for (auto part : text::split(value, ','))
                cfg.algorithms.push_back(policy_kind_from_string(std::string(text::trim(part))));
        } else if (key == "replications") cfg.replications = text::parse_u64(value);
        else if (key == "seed") cfg.seed = text::parse_u64(value);
        else if (key == "clcb_delta") cfg.clcb_delta = text::parse_double(value);
        else if (key == "reward_scale") cfg.reward_scale = text::parse_double(value);
        else if (key == "output_dir") cfg.output_dir = value;
        else if (key == "episode_logs") cfg.episode_logs = text::parse_bool(value);
        else throw ConfigError("unknown key '" + std::string(key) + "'");
    } catch (const DomainError& e) {
        throw ConfigError("key '" + std::string(key) + "': " + e.what());
    }
}

ExperimentConfig parse_config(std::string_view input) {
    ExperimentConfig cfg;
    std::set<std::string, std::less<>> seen;
    bool have_schema = false;
    std::size_t line_no = 0;
    for (auto line : text::split(input, '\n')) {
        ++line_no;
        line = text::trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
        const auto key = text::trim(line.substr(0, eq));
        const auto value = text::trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(line_no, "empty key");
        if (!seen.insert(std::string(key)).second)
            throw ParseError(line_no, "duplicate key '" + std::string(key) + "'");
        if (!have_schema) {
            if (key != "schema") throw ParseError(line_no, "first setting must be schema");
            if (value != kConfigSchema)
                throw ParseError(line_no, "unsupported schema '" + std::string(value) + "'");
            have_schema = true;
            continue;
        }
        try {
            set_config_value(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ParseError(line_no, e.what());
        }
    }
    if (!have_schema) throw ParseError(line_no, "missing schema line");
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string emit_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "schema = " << kConfigSchema << '\n';
    out << "env = " << to_string(cfg.env) << '\n';
    out << "m = " << cfg.arms << '\n';
    out << "k = " << cfg.action_size << '\n';
    out << "horizon = " << cfg.horizon << '\n';
    out << "offline_samples = " << cfg.offline_samples << '\n';
    out << "bias_mode = " << to_string(cfg.bias_mode) << '\n';
    if (cfg.bias) out << "bias = " << text::format_double(*cfg.bias) << '\n';
    out << "algorithms = "
        << text::join(cfg.algorithms, ',', [](PolicyKind p) { return std::string(to_string(p)); }) << '\n';
    out << "replications = " << cfg.replications << '\n';
    out << "seed = " << cfg.seed << '\n';
    out << "clcb_delta = " << text::format_double(cfg.clcb_delta) << '\n';
    out << "reward_scale = " << text::format_double(cfg.reward_scale) << '\n';
    out << "output_dir = " << cfg.output_dir << '\n';
    out << "episode_logs = " << (cfg.episode_logs ? "true" : "false") << '\n';
    return out.str();
}

// ------------------------------------------------------- instance and data

GeneratedInstance generate_instance(const ExperimentConfig& cfg, RngStream& rng) {
    cfg.validate();
    const std::size_t m = cfg.arms;
    std::vector<double> on(m), off(m), signed_bias(m, 0.0);
    if (cfg.bias_mode == BiasMode::Unbiased) {
        for (auto& x : on) x = rng.uniform_open(0.0, 0.5);
        off = on;
    } else {
        const double v = *cfg.bias;
        for (auto& x : on) x = rng.uniform_open(0.4, 0.5);
        for (std::size_t i = 0; i < m; ++i) {
            signed_bias[i] = rng.bernoulli(0.5) ? v : -v;
            off[i] = on[i] + signed_bias[i];
        }
    }
    GeneratedInstance inst{MeanVector(std::move(on)), MeanVector(std::move(off)),
                           BiasVector::uniform(m, cfg.bias_level()), std::move(signed_bias)};
    if (!validate_bias(inst.mu_off, inst.mu_on, inst.bias).empty())
        throw BiasViolation(0, "generated instance violates its own bias bound");
    return inst;
}

OfflineDataset generate_offline_data(const MeanVector& mu_off, Count samples, RngStream& rng) {
    std::vector<std::vector<double>> ys(mu_off.size());
    for (std::size_t i = 0; i < mu_off.size(); ++i) {
        ys[i].reserve(samples);
        for (Count s = 0; s < samples; ++s) ys[i].push_back(rng.bernoulli(mu_off[i]) ? 1.0 : 0.0);
    }
    return OfflineDataset(std::move(ys));
}

void write_offline_dataset(std::ostream& out, const OfflineDataset& data) {
    out << "arm_count=" << data.arms() << '\n';
    for (std::size_t i = 0; i < data.arms(); ++i) {
        out << i << ':';
        for (double y : data.samples(i)) out << ' ' << text::format_double(y);
        out << '\n';
    }
}

OfflineDataset read_offline_dataset(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw ParseError(line_no, "empty dataset file");
    const auto header = text::trim(line);
    constexpr std::string_view prefix = "arm_count=";
    if (header.substr(0, prefix.size()) != prefix) throw ParseError(line_no, "expected arm_count=m header");
    std::size_t arms = 0;
    try {
        arms = static_cast<std::size_t>(text::parse_u64(header.substr(prefix.size())));
    } catch (const DomainError& e) {
        throw ParseError(line_no, e.what());
    }
    std::vector<std::vector<double>> samples(arms);
    std::size_t next = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = text::trim(line);
        if (body.empty()) continue;
        const auto colon = body.find(':');
        if (colon == std::string_view::npos) throw ParseError(line_no, "expected 'i: samples'");
        try {
            const auto arm = text::parse_u64(body.substr(0, colon));
            if (arm != next) throw ParseError(line_no, "arms must appear once each, in order");
            if (arm >= arms) throw ParseError(line_no, "arm index beyond arm_count");
            std::istringstream values{std::string(body.substr(colon + 1))};
            std::string token;
            while (values >> token) {
                const double y = text::parse_double(token);
                if (!(y >= 0.0 && y <= 1.0)) throw ParseError(line_no, "sample outside [0,1]");
                samples[arm].push_back(y);
            }
        } catch (const DomainError& e) {
            throw ParseError(line_no, e.what());
        }
        ++next;
    }
    if (next != arms) throw ParseError(line_no, "dataset lists fewer arms than arm_count");
    return OfflineDataset(std::move(samples));
}

void save_offline_dataset(const fs::path& path, const OfflineDataset& data) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write dataset file " + path.string());
    write_offline_dataset(out, data);
    if (!out) throw IoError("write failed for " + path.string());
}

OfflineDataset load_offline_dataset(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset file " + path.string());
    return read_offline_dataset(in);
}

// ------------------------------------------------------------- experiment

ReplicationSetup prepare_replication(const ExperimentConfig& cfg, std::uint64_t replication) {
    ReplicationSetup setup;
    setup.replication = replication;
    RngStream instance_rng(cfg.seed, replication, StreamPurpose::Instance);
    setup.instance = generate_instance(cfg, instance_rng);
    RngStream data_rng(cfg.seed, replication, StreamPurpose::OfflineData);
    setup.data = generate_offline_data(setup.instance.mu_off, cfg.offline_samples, data_rng);
    setup.env = EnvSpec{cfg.env, cfg.arms, cfg.action_size, setup.instance.mu_on, cfg.reward_scale};
    return setup;
}

std::vector<RoundLog> run_replication_policy(const ExperimentConfig& cfg,
                                             const ReplicationSetup& setup, PolicyKind policy) {
    const auto env = make_environment(setup.env);
    const auto oracle = make_exact_oracle(*env);
    EpisodeStreams streams{RngStream(cfg.seed, setup.replication, StreamPurpose::Outcomes),
                           RngStream(cfg.seed, setup.replication, StreamPurpose::Trigger)};
    return run_episode(PolicyConfig{policy, cfg.clcb_delta}, setup.data, setup.instance.bias, *env,
                       *oracle, cfg.horizon, std::move(streams));
}

std::vector<double> cumulative_regret(const std::vector<RoundLog>& logs, const Environment& env,
                                      double opt) {
    std::vector<double> cum(logs.size());
    double reward_sum = 0.0;
    for (std::size_t t = 0; t < logs.size(); ++t) {
        const double r = env.expected_reward(logs[t].action, env.spec().mean);
        if (opt - r < 0.0) throw DomainError("negative per-round gap under the exact oracle");
        reward_sum += r;
        cum[t] = static_cast<double>(t + 1) * opt - reward_sum;
    }
    return cum;
}

void RegretSeries::aggregate() {
    const std::size_t reps = per_replication.size();
    const std::size_t rounds = reps ? per_replication.front().size() : 0;
    mean.assign(rounds, 0.0);
    standard_error.assign(rounds, 0.0);
    if (reps == 0) return;
    const double n = static_cast<double>(reps);
    for (std::size_t t = 0; t < rounds; ++t) {
        double sum = 0.0;
        for (const auto& series : per_replication) sum += series[t];
        const double mu = sum / n;
        double ss = 0.0;
        for (const auto& series : per_replication) ss += (series[t] - mu) * (series[t] - mu);
        mean[t] = mu;
        standard_error[t] = reps > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
    }
}

namespace {

void write_episode_log(const fs::path& dir, PolicyKind policy, std::uint64_t replication,
                       const std::vector<RoundLog>& logs) {
    fs::create_directories(dir);
    const fs::path path = dir / (std::string(to_string(policy)) + "_rep" + std::to_string(replication) + ".tsv");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write episode log " + path.string());
    out << round_log_header() << '\n';
    for (const auto& log : logs) out << format_round_log(log) << '\n';
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
    cfg.validate();
    ExperimentResult result;
    result.config = cfg;
    const std::size_t reps = cfg.replications;
    result.replications.resize(reps);
    result.series.resize(cfg.algorithms.size());
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
        result.series[a].algorithm = cfg.algorithms[a];
        result.series[a].per_replication.resize(reps);
    }

    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::uint64_t r = next.fetch_add(1);
            if (r >= reps) return;
            {
                std::lock_guard lock(failure_mutex);
                if (failure) return;
            }
            try {
                try {
                    const ReplicationSetup setup = prepare_replication(cfg, r);
                    const auto env = make_environment(setup.env);
                    const double opt = compute_opt(*env, setup.instance.mu_on).opt;
                    auto& record = result.replications[r];
                    record.instance = setup.instance;
                    record.offline_counts.resize(cfg.arms);
                    for (std::size_t i = 0; i < cfg.arms; ++i) record.offline_counts[i] = setup.data.count(i);
                    record.opt = opt;
                    record.instance_seed = derive_seed(cfg.seed, r, StreamPurpose::Instance);
                    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
                        const auto logs = run_replication_policy(cfg, setup, cfg.algorithms[a]);
                        if (cfg.episode_logs && options.log_dir)
                            write_episode_log(*options.log_dir, cfg.algorithms[a], r, logs);
                        result.series[a].per_replication[r] = cumulative_regret(logs, *env, opt);
                    }
                } catch (const Error& e) {
                    throw Error(e.kind(), "replication " + std::to_string(r) + ": " + e.what());
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(options.parallel, static_cast<unsigned>(reps)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    for (auto& s : result.series) s.aggregate();
    return result;
}

// --------------------------------------------------------------- emission

std::string format_results_csv(const ExperimentResult& result) {
    std::string out = "round,algorithm,mean_cum_regret,stderr,replications\n";
    const std::size_t rounds = result.config.horizon;
    const std::string reps = std::to_string(result.config.replications);
    for (std::size_t t = 0; t < rounds; ++t) {
        for (const auto& s : result.series) {
            out += std::to_string(t + 1);
            out += ',';
            out += to_string(s.algorithm);
            out += ',';
            out += text::format_double(s.mean[t]);
            out += ',';
            out += text::format_double(s.standard_error[t]);
            out += ',';
            out += reps;
            out += '\n';
        }
    }
    return out;
}

namespace {

std::string fixed2(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

const char* series_color(std::size_t i) {
    static const char* colors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"};
    return colors[i % 5];
}

}  // namespace

std::string render_svg(const ExperimentResult& result) {
    constexpr double width = 800, height = 480;
    constexpr double left = 70, right = 160, top = 30, bottom = 50;
    const double plot_w = width - left - right, plot_h = height - top - bottom;
    const std::size_t rounds = result.config.horizon;

    double y_max = 0.0;
    for (const auto& s : result.series) {
        for (std::size_t t = 0; t < rounds; ++t) y_max = std::max(y_max, s.mean[t] + s.standard_error[t]);
    }
    if (!(y_max > 0.0)) y_max = 1.0;

    const std::size_t stride = std::max<std::size_t>(1, (rounds + 399) / 400);
    std::vector<std::size_t> idx;
    for (std::size_t t = 0; t < rounds; t += stride) idx.push_back(t);
    if (idx.empty() || idx.back() != rounds - 1) idx.push_back(rounds - 1);

    auto px = [&](std::size_t t) {
        const double denom = rounds > 1 ? static_cast<double>(rounds - 1) : 1.0;
        return left + plot_w * static_cast<double>(t) / denom;
    };
    auto py = [&](double y) { return top + plot_h * (1.0 - y / y_max); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
        << top + plot_h << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
        << "\" stroke=\"black\"/>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double y = y_max * tick / 4.0;
        svg << "<text x=\"" << left - 6 << "\" y=\"" << fixed2(py(y) + 4) << "\" text-anchor=\"end\">"
            << fixed2(y) << "</text>\n";
        const std::size_t t = rounds > 1 ? (rounds - 1) * static_cast<std::size_t>(tick) / 4 : 0;
        svg << "<text x=\"" << fixed2(px(t)) << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"middle\">"
            << t + 1 << "</text>\n";
    }
    svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 10
        << "\" text-anchor=\"middle\">round</text>\n";
    svg << "<text x=\"16\" y=\"" << top + plot_h / 2 << "\" transform=\"rotate(-90 16 " << top + plot_h / 2
        << ")\" text-anchor=\"middle\">cumulative regret</text>\n";

    for (std::size_t a = 0; a < result.series.size(); ++a) {
        const auto& s = result.series[a];
        const char* color = series_color(a);
        svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
        for (std::size_t t : idx) svg << fixed2(px(t)) << ',' << fixed2(py(s.mean[t] + s.standard_error[t])) << ' ';
        for (auto it = idx.rbegin(); it != idx.rend(); ++it)
            svg << fixed2(px(*it)) << ',' << fixed2(py(std::max(0.0, s.mean[*it] - s.standard_error[*it]))) << ' ';
        svg << "\"/>\n";
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t t : idx) svg << fixed2(px(t)) << ',' << fixed2(py(s.mean[t])) << ' ';
        svg << "\"/>\n";
        const double ly = top + 14 + 18.0 * static_cast<double>(a);
        svg << "<line x1=\"" << left + plot_w + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + plot_w + 32
            << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << left + plot_w + 38 << "\" y=\"" << ly << "\">" << to_string(s.algorithm)
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string format_manifest(const ExperimentResult& result) {
    std::ostringstream out;
    out << "# run manifest: replay with `hcmab run --config <this file>`\n";
    out << emit_config(result.config);
    out << "# code_version = " << kCodeVersion << '\n';
    const auto& cfg = result.config;
    for (std::uint64_t r = 0; r < cfg.replications; ++r) {
        out << "# replication " << r << ": instance_seed=" << derive_seed(cfg.seed, r, StreamPurpose::Instance)
            << " offline_seed=" << derive_seed(cfg.seed, r, StreamPurpose::OfflineData)
            << " outcome_seed=" << derive_seed(cfg.seed, r, StreamPurpose::Outcomes)
            << " trigger_seed=" << derive_seed(cfg.seed, r, StreamPurpose::Trigger) << '\n';
    }
    return out.str();
}

void emit_results(const ExperimentResult& result, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    auto write = [&](const char* name, const std::string& body) {
        const fs::path path = dir / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write " + path.string());
        out << body;
        if (!out) throw IoError("write failed for " + path.string());
    };
    write("regret.csv", format_results_csv(result));
    write("regret.svg", render_svg(result));
    write("manifest.txt", format_manifest(result));
}

}  // namespace hcmab
