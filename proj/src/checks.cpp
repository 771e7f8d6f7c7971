#include "hcmab/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hcmab/env.hpp"
#include "hcmab/harness.hpp"
#include "hcmab/oracle.hpp"
#include "hcmab/theory.hpp"
#include "hcmab/verify.hpp"

namespace hcmab {

namespace {

std::string fmt(const char* format, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, x);
    return buf;
}

EnvSpec cascade_spec(std::size_t m, std::size_t k, std::vector<double> mu) {
    return EnvSpec{EnvModel::Cascade, m, k, MeanVector(std::move(mu)), 1.0};
}

EnvSpec single_trigger_spec(std::size_t m, std::size_t k, std::vector<double> mu, double scale) {
    return EnvSpec{EnvModel::SingleTrigger, m, k, MeanVector(std::move(mu)), scale};
}

CheckResult condition_result(std::string name, const ConditionReport& r, const char* worst_label) {
    std::ostringstream d;
    d << r.violations << " violations in " << r.trials << " trials, " << worst_label << ' '
      << fmt("%.6g", r.worst);
    return {std::move(name), r.passed(), d.str()};
}

CheckResult identifiability_result(std::string name, const IdentifiabilityReport& r) {
    std::ostringstream d;
    std::size_t inconclusive = 0;
    double worst = 0.0;
    for (const auto& a : r.arms) {
        if (a.inconclusive) {
            ++inconclusive;
            continue;
        }
        if (a.standard_error > 0.0)
            worst = std::max(worst, std::abs(a.observed_mean - a.true_mean) / a.standard_error);
    }
    d << r.arms.size() << " arms, worst deviation " << fmt("%.3g", worst) << " SE";
    if (inconclusive) d << ", " << inconclusive << " inconclusive";
    return {std::move(name), r.passed(), d.str()};
}

CheckResult decomposition_result(std::string name, const DecompositionReport& r) {
    std::ostringstream d;
    double worst = 0.0;
    for (const auto& a : r.arms) {
        const double diff = std::abs(a.mean_regret - a.mean_scaled_triggers);
        if (a.difference_se > 0.0) worst = std::max(worst, diff / a.difference_se);
    }
    d << r.arms.size() << " arms, " << r.replications << " replications, worst deviation "
      << fmt("%.3g", worst) << " SE";
    return {std::move(name), r.passed(), d.str()};
}

}  // namespace

std::vector<std::uint64_t> coverage_grid(std::uint64_t horizon) {
    std::vector<std::uint64_t> grid;
    for (std::uint64_t t : {1, 2, 3, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000, 20000, 50000})
        if (t <= horizon) grid.push_back(t);
    if (grid.empty() || grid.back() != horizon) grid.push_back(horizon);
    return grid;
}

std::vector<CoveragePoint> coverage_check(std::uint64_t replications, std::uint64_t horizon,
                                          std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.horizon = horizon;
    cfg.offline_samples = 200;
    cfg.replications = replications;
    cfg.seed = seed;
    cfg.algorithms = {PolicyKind::HybridCucb};
    cfg.validate();

    const auto grid = coverage_grid(horizon);
    std::vector<CoveragePoint> points(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) points[g].t = grid[g];

    for (std::uint64_t r = 0; r < replications; ++r) {
        const auto setup = prepare_replication(cfg, r);
        const auto logs = run_replication_policy(cfg, setup, PolicyKind::HybridCucb);
        for (auto& p : points) {
            const auto& log = logs[p.t - 1];
            for (std::size_t i = 0; i < cfg.arms; ++i) {
                if (setup.instance.mu_on[i] > log.bounds[i].ucb) {
                    ++p.violations;
                    break;
                }
            }
        }
    }
    const double n = static_cast<double>(replications);
    for (auto& p : points) {
        p.frequency = static_cast<double>(p.violations) / n;
        const double se = std::sqrt(p.frequency * (1.0 - p.frequency) / n);
        p.allowed = 2.0 * static_cast<double>(cfg.arms) * confidence_delta(p.t, cfg.arms) + 3.0 * se;
        p.passed = p.frequency <= p.allowed;
    }
    return points;
}

std::vector<CheckResult> check_conditions(const CheckOptions& o) {
    std::vector<CheckResult> out;
    RngStream mu_rng(o.seed, 0, StreamPurpose::Check);
    std::vector<double> mu(10);
    for (auto& x : mu) x = mu_rng.uniform01();
    const auto cascade = make_environment(cascade_spec(10, 5, mu));
    const auto single = make_environment(single_trigger_spec(6, 3, {0.7, 0.4, 0.5, 0.2, 0.9, 0.1}, 2.0));

    RngStream rng(o.seed, 1, StreamPurpose::Check);
    out.push_back(condition_result("monotonicity/cascade", check_monotonicity(*cascade, o.trials, rng),
                                   "worst excess"));
    out.push_back(condition_result("monotonicity/single-trigger",
                                   check_monotonicity(*single, o.trials, rng), "worst excess"));
    out.push_back(condition_result("tpm/cascade B=1", check_tpm(*cascade, 1.0, o.trials, rng), "max ratio"));
    out.push_back(condition_result("tpm/single-trigger B=2", check_tpm(*single, 2.0, o.trials, rng),
                                   "max ratio"));
    return out;
}

std::vector<CheckResult> check_identifiability_suite(const CheckOptions& o) {
    std::vector<CheckResult> out;
    const auto cascade = make_environment(cascade_spec(4, 2, {0.3, 0.5, 0.2, 0.6}));
    const auto single = make_environment(single_trigger_spec(4, 2, {0.7, 0.4, 0.5, 0.2}, 2.0));
    RngStream rng(o.seed, 2, StreamPurpose::Check);
    out.push_back(identifiability_result(
        "identifiability/cascade",
        check_identifiability(*cascade, uniform_random_policy(*cascade), o.identifiability_rounds, rng)));
    out.push_back(identifiability_result(
        "identifiability/single-trigger",
        check_identifiability(*single, uniform_random_policy(*single), o.identifiability_rounds, rng)));
    return out;
}

CheckResult check_coverage(const CheckOptions& o) {
    const auto points = coverage_check(o.coverage_replications, o.coverage_horizon, o.seed);
    bool ok = true;
    std::ostringstream d;
    d << o.coverage_replications << " replications;";
    for (const auto& p : points) {
        ok = ok && p.passed;
        d << " t=" << p.t << ':' << fmt("%.3g", p.frequency) << "<=" << fmt("%.3g", p.allowed);
    }
    return {"coverage/online-ucb", ok, d.str()};
}

std::vector<CheckResult> check_tau_star_oracle(const CheckOptions& o) {
    std::vector<CheckResult> out;

    bool ok = true;
    double worst = 0.0;
    std::uint64_t lower_bound_failures = 0, infeasible = 0;
    for (std::uint64_t n = 0; n < o.tau_continuous_instances; ++n) {
        RngStream rng(o.seed, n, StreamPurpose::Check);
        const std::size_t m = 1 + static_cast<std::size_t>(rng.index(5));
        std::vector<Count> counts(m);
        for (auto& c : counts) c = rng.index(51);
        const std::size_t k = 1 + static_cast<std::size_t>(rng.index(5));
        const std::uint64_t horizon = rng.index(100 / k + 1);
        const std::uint64_t budget = k * horizon;
        const auto sol = solve_tau_star(counts, k, horizon);
        const double brute = verify::tau_star_grid(counts, budget, 1e-6);
        worst = std::max(worst, std::abs(sol.tau - brute));
        if (std::abs(sol.tau - brute) > 1e-6) ok = false;
        if (sol.tau < static_cast<double>(budget) / static_cast<double>(m)) ++lower_bound_failures;
        double spent = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            spent += sol.allocation[i];
            if (sol.tau > static_cast<double>(counts[i]) + sol.allocation[i] + 1e-9) ++infeasible;
        }
        if (spent > static_cast<double>(budget) + 1e-9) ++infeasible;
    }
    std::ostringstream d1;
    d1 << o.tau_continuous_instances << " instances, max |water-fill - grid| " << fmt("%.3e", worst)
       << ", " << lower_bound_failures << " below KT/m, " << infeasible << " infeasible";
    out.push_back({"tau-star/continuous", ok && lower_bound_failures == 0 && infeasible == 0, d1.str()});

    std::uint64_t mismatches = 0;
    lower_bound_failures = 0;
    infeasible = 0;
    for (std::uint64_t n = 0; n < o.tau_integer_instances; ++n) {
        RngStream rng(o.seed + 1, n, StreamPurpose::Check);
        const std::size_t m = 1 + static_cast<std::size_t>(rng.index(4));
        std::vector<Count> counts(m);
        for (auto& c : counts) c = rng.index(31);
        const std::uint64_t budget = rng.index(41);
        const auto sol = solve_tau_star_budget(counts, budget);
        if (sol.tau_integer != verify::tau_star_exhaustive(counts, budget)) ++mismatches;
        if (sol.tau < static_cast<double>(budget) / static_cast<double>(m)) ++lower_bound_failures;
        std::uint64_t spent = 0;
        for (std::size_t i = 0; i < m; ++i) {
            spent += sol.allocation_integer[i];
            if (sol.tau_integer > counts[i] + sol.allocation_integer[i]) ++infeasible;
        }
        if (spent > budget) ++infeasible;
    }
    std::ostringstream d2;
    d2 << o.tau_integer_instances << " instances, " << mismatches << " mismatches vs exhaustive, "
       << lower_bound_failures << " below KT/m, " << infeasible << " infeasible";
    out.push_back({"tau-star/integer", mismatches == 0 && lower_bound_failures == 0 && infeasible == 0,
                   d2.str()});
    return out;
}

std::vector<CheckResult> check_decomposition(const CheckOptions& o) {
    std::vector<CheckResult> out;
    const auto env = make_environment(single_trigger_spec(6, 3, {0.5, 0.5, 0.5, 0.4, 0.35, 0.3}, 1.0));
    const auto actions = lower_bound_actions(6, 3);
    out.push_back(decomposition_result(
        "decomposition/random-policy",
        lowerbound_decomposition_random(*env, actions, o.decomposition_horizon,
                                        o.decomposition_replications, o.seed)));
    const ActionListOracle oracle(*env, actions);
    out.push_back(decomposition_result(
        "decomposition/hybrid-cucb",
        lowerbound_decomposition_check(*env, oracle, PolicyConfig{PolicyKind::HybridCucb},
                                       OfflineDataset::empty(6), BiasVector::uniform(6, 0.0),
                                       o.decomposition_horizon, o.decomposition_replications, o.seed)));
    return out;
}

std::vector<CheckResult> run_property_suite(const CheckOptions& o) {
    std::vector<CheckResult> out;
    auto append = [&out](std::vector<CheckResult> more) {
        for (auto& r : more) out.push_back(std::move(r));
    };
    append(check_conditions(o));
    append(check_identifiability_suite(o));
    out.push_back(check_coverage(o));
    append(check_tau_star_oracle(o));
    append(check_decomposition(o));
    return out;
}

}  // namespace hcmab
