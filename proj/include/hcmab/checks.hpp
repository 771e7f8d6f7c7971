#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hcmab {

struct CheckOptions {
    std::uint64_t trials = 10'000;               // monotonicity / TPM samples
    std::uint64_t identifiability_rounds = 100'000;
    std::uint64_t coverage_replications = 200;
    std::uint64_t coverage_horizon = 5000;
    std::uint64_t tau_continuous_instances = 200;
    std::uint64_t tau_integer_instances = 100;
    std::uint64_t decomposition_horizon = 10'000;
    std::uint64_t decomposition_replications = 50;
    std::uint64_t seed = 20240601;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct CoveragePoint {
    std::uint64_t t = 0;
    std::uint64_t violations = 0;   // replications where some arm had mu_i > UCB_t(i)
    double frequency = 0.0;
    double allowed = 0.0;           // 2 m delta_t + 3 standard errors
    bool passed = false;
};

/// Online-UCB coverage of hybrid CUCB on fresh m=10, k=5 unbiased instances with
/// N=200 offline samples per arm, one instance per replication.
std::vector<CoveragePoint> coverage_check(std::uint64_t replications, std::uint64_t horizon,
                                          std::uint64_t seed);

/// Grid of rounds inspected by coverage_check (values above the horizon dropped).
std::vector<std::uint64_t> coverage_grid(std::uint64_t horizon);

// Each returns one or more named results.
std::vector<CheckResult> check_conditions(const CheckOptions& options);
std::vector<CheckResult> check_identifiability_suite(const CheckOptions& options);
CheckResult check_coverage(const CheckOptions& options);
std::vector<CheckResult> check_tau_star_oracle(const CheckOptions& options);
std::vector<CheckResult> check_decomposition(const CheckOptions& options);

/// The full property suite in a fixed order.
std::vector<CheckResult> run_property_suite(const CheckOptions& options);

}  // namespace hcmab
