#pragma once

#include "irs_swipt/types.hpp"

#include <optional>
#include <vector>

namespace irs_swipt {

/// One linear residual in the phasors: sum_n exp(j theta_n) d_n - c.
struct PhaseTerm {
  CVector d;
  cd c;
};

/// f(v) = sum_t |v^T d_t - c_t|^2 over unit-modulus phasors v, held as the
/// Hermitian form v^T R conj(v) - 2 Re{v^T b} + sum_t |c_t|^2.
class PhaseQuadratic {
 public:
  PhaseQuadratic(int n, const std::vector<const std::vector<PhaseTerm>*>& groups);

  int size() const { return static_cast<int>(b_.size()); }
  const CMatrix& R() const { return R_; }
  const CVector& b() const { return b_; }
  double value(const CVector& v) const;

  /// Element-wise coordinate sweeps. Each coordinate is set to the exact
  /// minimizer (or maximizer) of f with the others fixed, optionally snapped
  /// onto the 2^bits uniform grid with a keep-previous guard. Sweeps stop when
  /// the fractional change of f drops below `tol` or `max_sweeps` is reached.
  CVector coordinate_sweeps(CVector v, bool maximize, double tol, int max_sweeps,
                            std::optional<int> phase_bits = std::nullopt, int* sweeps_done = nullptr) const;

 private:
  CMatrix R_;
  CVector b_;
  double constant_ = 0.0;
};

/// Nearest point exp(j k 2pi/2^bits) to u; ties go to the smaller k.
cd project_discrete(cd u, int bits);

}  // namespace irs_swipt
