// Command-line front end. Talks to the library only through the C API.
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "hcmab/hcmab.h"

namespace {

struct StringDeleter {
    void operator()(char* s) const { hcmab_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct ConfigDeleter {
    void operator()(hcmab_config* c) const { hcmab_config_free(c); }
};
struct ResultsDeleter {
    void operator()(hcmab_results* r) const { hcmab_results_free(r); }
};
struct BoundsDeleter {
    void operator()(hcmab_bounds* b) const { hcmab_bounds_free(b); }
};
struct CheckDeleter {
    void operator()(hcmab_check_report* r) const { hcmab_check_free(r); }
};

int report(hcmab_status status, const char* what) {
    std::fprintf(stderr, "hcmab: %s: %s: %s\n", what, hcmab_status_name(status), hcmab_last_error());
    return 1;
}

std::unique_ptr<hcmab_config, ConfigDeleter> load_config(const std::string& path, int& rc) {
    hcmab_config* raw = nullptr;
    if (auto st = hcmab_config_load(path.c_str(), &raw); st != HCMAB_OK) {
        rc = report(st, "loading config");
        return nullptr;
    }
    return std::unique_ptr<hcmab_config, ConfigDeleter>(raw);
}

struct RunArgs {
    std::string config;
    std::string out;
    std::string seed;
    unsigned parallel = 1;
};

int cmd_run(const RunArgs& args) {
    int rc = 0;
    auto cfg = load_config(args.config, rc);
    if (!cfg) return rc;
    if (!args.seed.empty()) {
        if (auto st = hcmab_config_set(cfg.get(), "seed", args.seed.c_str()); st != HCMAB_OK)
            return report(st, "--seed");
    }
    if (!args.out.empty()) {
        if (auto st = hcmab_config_set(cfg.get(), "output_dir", args.out.c_str()); st != HCMAB_OK)
            return report(st, "--out");
    }
    char* dir_raw = nullptr;
    if (auto st = hcmab_config_get(cfg.get(), "output_dir", &dir_raw); st != HCMAB_OK)
        return report(st, "reading output_dir");
    const OwnedString dir(dir_raw);
    const std::string log_dir = std::string(dir.get()) + "/logs";

    hcmab_results* res_raw = nullptr;
    if (auto st = hcmab_run_experiment(cfg.get(), args.parallel, log_dir.c_str(), &res_raw); st != HCMAB_OK)
        return report(st, "running experiment");
    std::unique_ptr<hcmab_results, ResultsDeleter> res(res_raw);
    if (auto st = hcmab_results_emit(res.get(), dir.get()); st != HCMAB_OK) return report(st, "writing results");

    const auto rounds = hcmab_results_rounds(res.get());
    std::printf("%-12s %16s %10s\n", "algorithm", "final regret", "stderr");
    for (size_t a = 0; a < hcmab_results_algorithm_count(res.get()); ++a) {
        const char* name = nullptr;
        double mean = 0.0, se = 0.0;
        hcmab_results_algorithm_name(res.get(), a, &name);
        hcmab_results_regret(res.get(), a, rounds, &mean, &se);
        std::printf("%-12s %16.4f %10.4f\n", name, mean, se);
    }
    std::printf("wrote %s/regret.csv, regret.svg, manifest.txt\n", dir.get());
    return 0;
}

int cmd_bounds(const std::string& instance, const std::string& format) {
    hcmab_bounds* raw = nullptr;
    if (auto st = hcmab_bounds_load(instance.c_str(), &raw); st != HCMAB_OK) return report(st, "evaluating bounds");
    std::unique_ptr<hcmab_bounds, BoundsDeleter> bounds(raw);
    char* text = nullptr;
    if (auto st = hcmab_bounds_format(bounds.get(), format == "records", &text); st != HCMAB_OK)
        return report(st, "formatting bounds");
    const OwnedString owned(text);
    std::fputs(owned.get(), stdout);
    return 0;
}

int cmd_gen_data(const std::string& config, const std::string& out, std::uint64_t replication) {
    int rc = 0;
    auto cfg = load_config(config, rc);
    if (!cfg) return rc;
    if (auto st = hcmab_generate_data(cfg.get(), replication, out.c_str()); st != HCMAB_OK)
        return report(st, "generating offline data");
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

int cmd_check(std::uint64_t trials) {
    hcmab_check_options options;
    hcmab_check_options_default(&options);
    options.trials = trials;
    hcmab_check_report* raw = nullptr;
    if (auto st = hcmab_check_run(&options, &raw); st != HCMAB_OK) return report(st, "running checks");
    std::unique_ptr<hcmab_check_report, CheckDeleter> rep(raw);
    for (size_t i = 0; i < hcmab_check_count(rep.get()); ++i) {
        const char* name = nullptr;
        const char* detail = nullptr;
        int passed = 0;
        hcmab_check_entry(rep.get(), i, &name, &passed, &detail);
        std::printf("%s  %-32s %s\n", passed ? "PASS" : "FAIL", name, detail);
    }
    return hcmab_check_all_passed(rep.get()) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybrid combinatorial bandit simulator and bound calculator"};
    app.set_version_flag("--version", std::string(hcmab_version()));
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("--config", run_args.config, "experiment config file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", run_args.out, "output directory (overrides output_dir)");
    run->add_option("--seed", run_args.seed, "base seed (overrides seed)");
    run->add_option("--parallel", run_args.parallel, "worker threads")->check(CLI::PositiveNumber);

    std::string instance, format = "text";
    auto* bounds = app.add_subcommand("bounds", "evaluate regret bounds for an instance file");
    bounds->add_option("--instance", instance, "instance file")->required()->check(CLI::ExistingFile);
    bounds->add_option("--format", format, "text or records")->check(CLI::IsMember({"text", "records"}));

    std::string data_config, data_out;
    std::uint64_t replication = 0;
    auto* gen = app.add_subcommand("gen-data", "write the offline dataset for a config");
    gen->add_option("--config", data_config, "experiment config file")->required()->check(CLI::ExistingFile);
    gen->add_option("--out", data_out, "dataset file to write")->required();
    gen->add_option("--replication", replication, "replication whose instance is used");

    std::uint64_t trials = 10'000;
    auto* check = app.add_subcommand("check", "run the property suite");
    check->add_option("--trials", trials, "random trials for the condition checks")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    if (*run) return cmd_run(run_args);
    if (*bounds) return cmd_bounds(instance, format);
    if (*gen) return cmd_gen_data(data_config, data_out, replication);
    return cmd_check(trials);
}
