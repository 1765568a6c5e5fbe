#pragma once

#include "irs_swipt/penalty_solver.hpp"

#include <vector>

namespace irs_swipt {

struct UserRef {
  UserKind kind = UserKind::Iu;
  int index = 0;

  friend bool operator==(const UserRef&, const UserRef&) = default;
};

/// Each user served by exactly one IRS (0-based indices).
struct Association {
  std::vector<int> iu_irs;
  std::vector<int> eu_irs;
  std::vector<std::vector<UserRef>> members;  // per IRS, IUs first then EUs

  int num_irs() const { return static_cast<int>(members.size()); }
};

/// Nearest IRS by distance to its reference element; ties go to the lower index.
Association associate_users(const Scenario& scenario);

struct IrsPhaseParams {
  double tol = 1e-4;
  int max_sweeps = 100;
  std::optional<int> phase_bits;
};

/// Sum over the IRS's users of ||effective channel||^2 counting only that IRS
/// and the direct link, as a function of its own phases.
double irs_sum_gain(const ChannelSet& cs, const std::vector<UserRef>& users, int irs,
                    const RVector& theta_irs);

/// Coordinate ascent on irs_sum_gain from u = all-ones. Empty user sets give
/// all-zero phases. Returns radians, length N_l.
RVector optimize_irs_phases(const ChannelSet& cs, const Association& assoc, int irs,
                            const IrsPhaseParams& params);

struct LowComplexityOptions {
  bool parallel = true;
  int max_sweeps = 100;
};

/// Per-IRS phases (concurrently), then a precoder-only penalty solve on the
/// resulting effective channels.
SolveReport solve_low_complexity(const Problem& problem, const Association& assoc,
                                 const SolverParams& params, const LowComplexityOptions& options = {});

}  // namespace irs_swipt
