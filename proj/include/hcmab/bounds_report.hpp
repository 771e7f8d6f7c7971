#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hcmab/core.hpp"
#include "hcmab/env.hpp"
#include "hcmab/theory.hpp"

namespace hcmab {

inline constexpr std::string_view kInstanceSchema = "hcmab-instance/1";

/// Theory-evaluation input. Text form is flat `key = value` with keys
/// schema, env, m, k, horizon, mu_on, mu_off, bias, offline_counts,
/// reward_scale, alpha. Per-arm keys take a comma list or a single value
/// broadcast to every arm; mu_off defaults to mu_on, bias and
/// offline_counts to 0.
struct BoundsInstance {
    EnvSpec env;
    MeanVector mu_off;
    BiasVector bias;
    std::vector<Count> offline_counts;
    std::uint64_t horizon = 1;
    double alpha = 1.0;
};

BoundsInstance parse_bounds_instance(std::string_view text);
BoundsInstance load_bounds_instance(const std::filesystem::path& path);

struct BoundsReport {
    BoundsInstance instance;
    TheoryInstance theory;
    std::vector<double> effective_gapdep;    // N_i'
    std::vector<double> effective_gapindep;  // N_i''
    TauStarSolution tau;
    double gap_dependent = 0.0;
    GammaValue gamma;
    GapIndependentBound gap_independent;
};

BoundsReport evaluate_bounds(const BoundsInstance& instance);

/// Aligned text tables for reading at a terminal.
std::string format_bounds_text(const BoundsReport& report);

/// One `section key=value ...` record per line, for scripts.
std::string format_bounds_records(const BoundsReport& report);

}  // namespace hcmab
