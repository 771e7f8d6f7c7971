#include "hcmab/hcmab.h"

#include <cstring>
#include <new>
#include <string>

#include "hcmab/bounds_report.hpp"
#include "hcmab/checks.hpp"
#include "hcmab/errors.hpp"
#include "hcmab/harness.hpp"
#include "hcmab/text.hpp"
#include "hcmab/theory.hpp"

struct hcmab_config {
    hcmab::ExperimentConfig cfg;
};

struct hcmab_results {
    hcmab::ExperimentResult result;
    std::vector<std::string> names;
};

struct hcmab_bounds {
    hcmab::BoundsReport report;
};

struct hcmab_check_report {
    std::vector<hcmab::CheckResult> results;
};

namespace {

thread_local std::string last_error;

hcmab_status status_of(hcmab::ErrorKind kind) {
    using hcmab::ErrorKind;
    switch (kind) {
        case ErrorKind::Domain: return HCMAB_ERR_DOMAIN;
        case ErrorKind::Shape: return HCMAB_ERR_SHAPE;
        case ErrorKind::BiasViolation: return HCMAB_ERR_BIAS;
        case ErrorKind::InvalidAction: return HCMAB_ERR_INVALID_ACTION;
        case ErrorKind::TooLarge: return HCMAB_ERR_TOO_LARGE;
        case ErrorKind::Io: return HCMAB_ERR_IO;
        case ErrorKind::Parse: return HCMAB_ERR_PARSE;
        case ErrorKind::Config: return HCMAB_ERR_CONFIG;
    }
    return HCMAB_ERR_INTERNAL;
}

hcmab_status fail(hcmab_status status, std::string message) {
    last_error = std::move(message);
    return status;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
hcmab_status guarded(Fn&& fn) {
    try {
        fn();
        return HCMAB_OK;
    } catch (const hcmab::Error& e) {
        return fail(status_of(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(HCMAB_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(HCMAB_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(HCMAB_ERR_INTERNAL, "unknown error");
    }
}

char* dup_string(const std::string& s) {
    auto* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

hcmab_status null_argument(const char* what) {
    return fail(HCMAB_ERR_ARGUMENT, std::string(what) + " must not be null");
}

}  // namespace

extern "C" {

const char* hcmab_version(void) { return hcmab::kCodeVersion.data(); }

const char* hcmab_status_name(hcmab_status status) {
    switch (status) {
        case HCMAB_OK: return "ok";
        case HCMAB_ERR_DOMAIN: return "domain error";
        case HCMAB_ERR_SHAPE: return "shape error";
        case HCMAB_ERR_BIAS: return "bias violation";
        case HCMAB_ERR_INVALID_ACTION: return "invalid action";
        case HCMAB_ERR_TOO_LARGE: return "instance too large";
        case HCMAB_ERR_IO: return "I/O error";
        case HCMAB_ERR_PARSE: return "parse error";
        case HCMAB_ERR_CONFIG: return "config error";
        case HCMAB_ERR_ARGUMENT: return "invalid argument";
        case HCMAB_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* hcmab_last_error(void) { return last_error.c_str(); }

void hcmab_string_free(char* str) { delete[] str; }

hcmab_status hcmab_config_default(hcmab_config** out) {
    if (!out) return null_argument("out");
    return guarded([&] { *out = new hcmab_config{}; });
}

hcmab_status hcmab_config_parse(const char* text, hcmab_config** out) {
    if (!text || !out) return null_argument("text and out");
    return guarded([&] { *out = new hcmab_config{hcmab::parse_config(text)}; });
}

hcmab_status hcmab_config_load(const char* path, hcmab_config** out) {
    if (!path || !out) return null_argument("path and out");
    return guarded([&] { *out = new hcmab_config{hcmab::load_config(path)}; });
}

hcmab_status hcmab_config_set(hcmab_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return null_argument("config, key and value");
    return guarded([&] {
        hcmab::ExperimentConfig updated = cfg->cfg;
        hcmab::set_config_value(updated, key, value);
        updated.validate();
        cfg->cfg = std::move(updated);
    });
}

hcmab_status hcmab_config_get(const hcmab_config* cfg, const char* key, char** out) {
    if (!cfg || !key || !out) return null_argument("config, key and out");
    return guarded([&] {
        const std::string wanted(key);
        for (auto line : hcmab::text::split(hcmab::emit_config(cfg->cfg), '\n')) {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) continue;
            if (hcmab::text::trim(line.substr(0, eq)) == wanted) {
                *out = dup_string(std::string(hcmab::text::trim(line.substr(eq + 1))));
                return;
            }
        }
        if (wanted == "bias") {
            *out = dup_string("");
            return;
        }
        throw hcmab::ConfigError("unknown config key '" + wanted + "'");
    });
}

hcmab_status hcmab_config_emit(const hcmab_config* cfg, char** out) {
    if (!cfg || !out) return null_argument("config and out");
    return guarded([&] { *out = dup_string(hcmab::emit_config(cfg->cfg)); });
}

void hcmab_config_free(hcmab_config* cfg) { delete cfg; }

hcmab_status hcmab_run_experiment(const hcmab_config* cfg, unsigned parallel, const char* log_dir,
                                  hcmab_results** out) {
    if (!cfg || !out) return null_argument("config and out");
    return guarded([&] {
        hcmab::RunOptions options;
        options.parallel = parallel == 0 ? 1 : parallel;
        if (log_dir) options.log_dir = log_dir;
        auto res = std::make_unique<hcmab_results>();
        res->result = hcmab::run_experiment(cfg->cfg, options);
        for (const auto& s : res->result.series) res->names.emplace_back(hcmab::to_string(s.algorithm));
        *out = res.release();
    });
}

size_t hcmab_results_algorithm_count(const hcmab_results* res) {
    return res ? res->result.series.size() : 0;
}

uint64_t hcmab_results_rounds(const hcmab_results* res) {
    return res && !res->result.series.empty() ? res->result.series.front().mean.size() : 0;
}

hcmab_status hcmab_results_algorithm_name(const hcmab_results* res, size_t index, const char** name) {
    if (!res || !name) return null_argument("results and name");
    if (index >= res->names.size()) return fail(HCMAB_ERR_ARGUMENT, "algorithm index out of range");
    *name = res->names[index].c_str();
    return HCMAB_OK;
}

hcmab_status hcmab_results_regret(const hcmab_results* res, size_t index, uint64_t round, double* mean,
                                  double* standard_error) {
    if (!res) return null_argument("results");
    if (index >= res->result.series.size()) return fail(HCMAB_ERR_ARGUMENT, "algorithm index out of range");
    const auto& s = res->result.series[index];
    if (round == 0 || round > s.mean.size()) return fail(HCMAB_ERR_ARGUMENT, "round out of range");
    if (mean) *mean = s.mean[round - 1];
    if (standard_error) *standard_error = s.standard_error[round - 1];
    return HCMAB_OK;
}

hcmab_status hcmab_results_csv(const hcmab_results* res, char** out) {
    if (!res || !out) return null_argument("results and out");
    return guarded([&] { *out = dup_string(hcmab::format_results_csv(res->result)); });
}

hcmab_status hcmab_results_emit(const hcmab_results* res, const char* dir) {
    if (!res || !dir) return null_argument("results and dir");
    return guarded([&] { hcmab::emit_results(res->result, dir); });
}

void hcmab_results_free(hcmab_results* res) { delete res; }

hcmab_status hcmab_generate_data(const hcmab_config* cfg, uint64_t replication, const char* path) {
    if (!cfg || !path) return null_argument("config and path");
    return guarded([&] {
        const auto setup = hcmab::prepare_replication(cfg->cfg, replication);
        hcmab::save_offline_dataset(path, setup.data);
    });
}

hcmab_status hcmab_bounds_parse(const char* text, hcmab_bounds** out) {
    if (!text || !out) return null_argument("text and out");
    return guarded([&] {
        *out = new hcmab_bounds{hcmab::evaluate_bounds(hcmab::parse_bounds_instance(text))};
    });
}

hcmab_status hcmab_bounds_load(const char* path, hcmab_bounds** out) {
    if (!path || !out) return null_argument("path and out");
    return guarded([&] {
        *out = new hcmab_bounds{hcmab::evaluate_bounds(hcmab::load_bounds_instance(path))};
    });
}

hcmab_status hcmab_bounds_format(const hcmab_bounds* bounds, int records, char** out) {
    if (!bounds || !out) return null_argument("bounds and out");
    return guarded([&] {
        *out = dup_string(records ? hcmab::format_bounds_records(bounds->report)
                                  : hcmab::format_bounds_text(bounds->report));
    });
}

hcmab_status hcmab_bounds_values(const hcmab_bounds* bounds, double* gap_dependent, double* gap_independent,
                                 double* tau_star) {
    if (!bounds) return null_argument("bounds");
    if (gap_dependent) *gap_dependent = bounds->report.gap_dependent;
    if (gap_independent) *gap_independent = bounds->report.gap_independent.value;
    if (tau_star) *tau_star = bounds->report.tau.tau;
    return HCMAB_OK;
}

void hcmab_bounds_free(hcmab_bounds* bounds) { delete bounds; }

void hcmab_check_options_default(hcmab_check_options* options) {
    if (!options) return;
    const hcmab::CheckOptions d;
    options->trials = d.trials;
    options->identifiability_rounds = d.identifiability_rounds;
    options->coverage_replications = d.coverage_replications;
    options->coverage_horizon = d.coverage_horizon;
    options->decomposition_horizon = d.decomposition_horizon;
    options->decomposition_replications = d.decomposition_replications;
    options->seed = d.seed;
}

hcmab_status hcmab_check_run(const hcmab_check_options* options, hcmab_check_report** out) {
    if (!out) return null_argument("out");
    hcmab::CheckOptions o;
    if (options) {
        if (options->trials == 0 || options->identifiability_rounds == 0 || options->coverage_replications == 0 ||
            options->coverage_horizon == 0 || options->decomposition_horizon == 0 ||
            options->decomposition_replications < 2)
            return fail(HCMAB_ERR_ARGUMENT, "check options must be positive (at least 2 decomposition replications)");
        o.trials = options->trials;
        o.identifiability_rounds = options->identifiability_rounds;
        o.coverage_replications = options->coverage_replications;
        o.coverage_horizon = options->coverage_horizon;
        o.decomposition_horizon = options->decomposition_horizon;
        o.decomposition_replications = options->decomposition_replications;
        o.seed = options->seed;
    }
    return guarded([&] { *out = new hcmab_check_report{hcmab::run_property_suite(o)}; });
}

size_t hcmab_check_count(const hcmab_check_report* report) { return report ? report->results.size() : 0; }

hcmab_status hcmab_check_entry(const hcmab_check_report* report, size_t index, const char** name,
                               int* passed, const char** detail) {
    if (!report) return null_argument("report");
    if (index >= report->results.size()) return fail(HCMAB_ERR_ARGUMENT, "check index out of range");
    const auto& r = report->results[index];
    if (name) *name = r.name.c_str();
    if (passed) *passed = r.passed ? 1 : 0;
    if (detail) *detail = r.detail.c_str();
    return HCMAB_OK;
}

int hcmab_check_all_passed(const hcmab_check_report* report) {
    if (!report) return 0;
    for (const auto& r : report->results)
        if (!r.passed) return 0;
    return 1;
}

void hcmab_check_free(hcmab_check_report* report) { delete report; }

hcmab_status hcmab_rad_online(uint64_t t, size_t arms, uint64_t online_count, double* out) {
    if (!out) return null_argument("out");
    return guarded([&] { *out = hcmab::rad_online(t, arms, online_count); });
}

hcmab_status hcmab_rad_hybrid(uint64_t t, size_t arms, uint64_t offline_count, uint64_t online_count,
                              double bias, double* out) {
    if (!out) return null_argument("out");
    return guarded([&] { *out = hcmab::rad_hybrid(t, arms, offline_count, online_count, bias); });
}

hcmab_status hcmab_tau_star(const uint64_t* offline_counts, size_t arms, size_t max_triggered, uint64_t horizon,
                            double* tau) {
    if (!tau || (arms > 0 && !offline_counts)) return null_argument("counts and tau");
    return guarded([&] {
        std::vector<hcmab::Count> counts(offline_counts, offline_counts + arms);
        *tau = hcmab::solve_tau_star(counts, max_triggered, horizon).tau;
    });
}

}  // extern "C"
