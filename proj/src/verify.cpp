#include "hcmab/verify.hpp"

#include <algorithm>
#include <cmath>

#include "hcmab/errors.hpp"

namespace hcmab::verify {

namespace {

// Minimum budget needed to lift every arm to level tau.
bool level_feasible(const std::vector<Count>& counts, std::uint64_t budget, double tau) {
    double need = 0.0;
    for (Count n : counts) need += std::max(tau - static_cast<double>(n), 0.0);
    // grid levels are accumulated in floating point, so exact hits land a few ulps high
    return need <= static_cast<double>(budget) + 1e-9;
}

void enumerate(const std::vector<Count>& counts, std::size_t arm, std::uint64_t remaining,
               std::uint64_t current_min, std::uint64_t& best) {
    if (arm == counts.size()) {
        best = std::max(best, current_min);
        return;
    }
    for (std::uint64_t n = 0; n <= remaining; ++n) {
        enumerate(counts, arm + 1, remaining - n, std::min(current_min, counts[arm] + n), best);
    }
}

}  // namespace

double tau_star_grid(const std::vector<Count>& offline_counts, std::uint64_t budget,
                     double resolution) {
    if (offline_counts.empty()) throw ShapeError("tau* needs at least one arm");
    const double hi = static_cast<double>(*std::max_element(offline_counts.begin(), offline_counts.end())) +
                      static_cast<double>(budget) + 1.0;
    double base = 0.0;
    double step = 1.0;
    // Scan integers first, then each finer decade inside the last feasible cell.
    std::uint64_t cells = static_cast<std::uint64_t>(hi) + 1;
    while (true) {
        double best = base;
        for (std::uint64_t j = 0; j <= cells; ++j) {
            const double tau = base + static_cast<double>(j) * step;
            if (level_feasible(offline_counts, budget, tau)) best = tau;
            else break;
        }
        base = best;
        if (step <= resolution * 1.0000001) return base;
        step /= 10.0;
        cells = 10;
    }
}

std::uint64_t tau_star_exhaustive(const std::vector<Count>& offline_counts, std::uint64_t budget) {
    if (offline_counts.empty()) throw ShapeError("tau* needs at least one arm");
    std::uint64_t best = 0;
    enumerate(offline_counts, 0, budget, UINT64_MAX, best);
    return best;
}

}  // namespace hcmab::verify
