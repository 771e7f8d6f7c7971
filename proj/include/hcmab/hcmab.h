/* C interface to the hcmab simulation and bound library.
 *
 * Every call that can fail returns an hcmab_status; on failure the message is
 * available from hcmab_last_error() on the same thread until the next failing
 * call. Strings returned through char** are owned by the caller and released
 * with hcmab_string_free. Handles are released with their matching _free
 * function; passing NULL to any _free is a no-op. */
#ifndef HCMAB_H
#define HCMAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HCMAB_API __declspec(dllexport)
#else
#define HCMAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hcmab_status {
    HCMAB_OK = 0,
    HCMAB_ERR_DOMAIN = 1,
    HCMAB_ERR_SHAPE = 2,
    HCMAB_ERR_BIAS = 3,
    HCMAB_ERR_INVALID_ACTION = 4,
    HCMAB_ERR_TOO_LARGE = 5,
    HCMAB_ERR_IO = 6,
    HCMAB_ERR_PARSE = 7,
    HCMAB_ERR_CONFIG = 8,
    HCMAB_ERR_ARGUMENT = 9, /* NULL handle or out-of-range index */
    HCMAB_ERR_INTERNAL = 10
} hcmab_status;

typedef struct hcmab_config hcmab_config;
typedef struct hcmab_results hcmab_results;
typedef struct hcmab_bounds hcmab_bounds;
typedef struct hcmab_check_report hcmab_check_report;

HCMAB_API const char* hcmab_version(void);
HCMAB_API const char* hcmab_status_name(hcmab_status status);
HCMAB_API const char* hcmab_last_error(void);
HCMAB_API void hcmab_string_free(char* str);

/* Experiment configuration */
HCMAB_API hcmab_status hcmab_config_default(hcmab_config** out);
HCMAB_API hcmab_status hcmab_config_parse(const char* text, hcmab_config** out);
HCMAB_API hcmab_status hcmab_config_load(const char* path, hcmab_config** out);
/* Sets one key as it would appear in a config file, then revalidates. */
HCMAB_API hcmab_status hcmab_config_set(hcmab_config* cfg, const char* key, const char* value);
/* Current value of one key in config-file syntax; HCMAB_ERR_CONFIG for an unknown
 * key, empty string for an unset optional key. */
HCMAB_API hcmab_status hcmab_config_get(const hcmab_config* cfg, const char* key, char** out);
HCMAB_API hcmab_status hcmab_config_emit(const hcmab_config* cfg, char** out);
HCMAB_API void hcmab_config_free(hcmab_config* cfg);

/* Experiments. log_dir may be NULL; it is used only when episode_logs is set. */
HCMAB_API hcmab_status hcmab_run_experiment(const hcmab_config* cfg, unsigned parallel,
                                            const char* log_dir, hcmab_results** out);
HCMAB_API size_t hcmab_results_algorithm_count(const hcmab_results* res);
HCMAB_API uint64_t hcmab_results_rounds(const hcmab_results* res);
HCMAB_API hcmab_status hcmab_results_algorithm_name(const hcmab_results* res, size_t index,
                                                    const char** name);
/* Mean cumulative regret and its standard error after `round` rounds (1-based). */
HCMAB_API hcmab_status hcmab_results_regret(const hcmab_results* res, size_t index, uint64_t round,
                                            double* mean, double* standard_error);
HCMAB_API hcmab_status hcmab_results_csv(const hcmab_results* res, char** out);
/* Writes regret.csv, regret.svg and manifest.txt into dir. */
HCMAB_API hcmab_status hcmab_results_emit(const hcmab_results* res, const char* dir);
HCMAB_API void hcmab_results_free(hcmab_results* res);

/* Writes the offline dataset of one replication of cfg to path. */
HCMAB_API hcmab_status hcmab_generate_data(const hcmab_config* cfg, uint64_t replication,
                                           const char* path);

/* Theory bounds for an instance file */
HCMAB_API hcmab_status hcmab_bounds_parse(const char* text, hcmab_bounds** out);
HCMAB_API hcmab_status hcmab_bounds_load(const char* path, hcmab_bounds** out);
/* records = 0 gives aligned tables, nonzero gives key=value records. */
HCMAB_API hcmab_status hcmab_bounds_format(const hcmab_bounds* bounds, int records, char** out);
HCMAB_API hcmab_status hcmab_bounds_values(const hcmab_bounds* bounds, double* gap_dependent,
                                           double* gap_independent, double* tau_star);
HCMAB_API void hcmab_bounds_free(hcmab_bounds* bounds);

/* Property suite */
typedef struct hcmab_check_options {
    uint64_t trials;
    uint64_t identifiability_rounds;
    uint64_t coverage_replications;
    uint64_t coverage_horizon;
    uint64_t decomposition_horizon;
    uint64_t decomposition_replications;
    uint64_t seed;
} hcmab_check_options;

HCMAB_API void hcmab_check_options_default(hcmab_check_options* options);
/* options may be NULL for the defaults. */
HCMAB_API hcmab_status hcmab_check_run(const hcmab_check_options* options, hcmab_check_report** out);
HCMAB_API size_t hcmab_check_count(const hcmab_check_report* report);
HCMAB_API hcmab_status hcmab_check_entry(const hcmab_check_report* report, size_t index,
                                         const char** name, int* passed, const char** detail);
HCMAB_API int hcmab_check_all_passed(const hcmab_check_report* report);
HCMAB_API void hcmab_check_free(hcmab_check_report* report);

/* Scalar helpers. Infinite radii are reported as HUGE_VAL. */
HCMAB_API hcmab_status hcmab_rad_online(uint64_t t, size_t arms, uint64_t online_count, double* out);
HCMAB_API hcmab_status hcmab_rad_hybrid(uint64_t t, size_t arms, uint64_t offline_count,
                                        uint64_t online_count, double bias, double* out);
HCMAB_API hcmab_status hcmab_tau_star(const uint64_t* offline_counts, size_t arms, size_t max_triggered,
                                      uint64_t horizon, double* tau);

#ifdef __cplusplus
}
#endif

#endif
