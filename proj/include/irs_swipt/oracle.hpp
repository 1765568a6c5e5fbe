#pragma once

#include "irs_swipt/penalty_solver.hpp"

#include <utility>

namespace irs_swipt {

// Brute-force and analytic references. These share no update code with the
// solvers except the precoder-only solve used by grid_search_phases when no
// closed form exists.

/// Minimum-power precoder for a single IU without interference:
/// w = sqrt(gamma sigma2) h / ||h||^2. Throws std::domain_error for h = 0.
std::pair<CVector, double> optimal_precoder_single_iu(const CVector& h, double gamma, double sigma2);

struct GridSearchResult {
  PhaseShifts phases;
  double power = 0.0;
  long evaluations = 0;
};

inline constexpr double kGridSearchLimit = 1e6;

/// Exhaustive search over the uniform phase grid with `levels` points per
/// element; each grid point is scored by its minimum precoder power. Refuses
/// (std::length_error) when levels^N exceeds kGridSearchLimit.
GridSearchResult grid_search_phases(const Problem& problem, int levels, const SolverParams& params = {});

/// Projection onto {||s||^2 + ||t||^2 >= E} by bisection on the dual variable.
std::pair<CVector, CVector> dual_bisection_eu(const CVector& s_bar, const CVector& t_bar, double e_min,
                                              double tol = 1e-14);

}  // namespace irs_swipt
