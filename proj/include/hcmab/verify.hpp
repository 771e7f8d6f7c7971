#pragma once

#include <cstdint>
#include <vector>

#include "hcmab/core.hpp"

// Brute-force reference solvers. These deliberately share no code with the
// water-filling solver in theory.cpp.
namespace hcmab::verify {

/// Largest tau on a 1e-6 grid with some real n >= 0, sum n <= budget and
/// tau <= N_i + n_i. Feasibility is monotone in tau, so the search refines a
/// coarse grid decade by decade instead of scanning every 1e-6 step.
double tau_star_grid(const std::vector<Count>& offline_counts, std::uint64_t budget,
                     double resolution = 1e-6);

/// max over integer n >= 0 with sum n <= budget of min_i (N_i + n_i), by
/// exhaustive enumeration. Exponential; intended for m <= 4, budget <= 40.
std::uint64_t tau_star_exhaustive(const std::vector<Count>& offline_counts, std::uint64_t budget);

}  // namespace hcmab::verify
