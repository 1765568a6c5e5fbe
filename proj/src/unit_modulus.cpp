#include "irs_swipt/unit_modulus.hpp"

#include <cmath>

namespace irs_swipt {

PhaseQuadratic::PhaseQuadratic(int n, const std::vector<const std::vector<PhaseTerm>*>& groups)
    : R_(CMatrix::Zero(n, n)), b_(CVector::Zero(n)) {
  for (const auto* group : groups) {
    for (const auto& term : *group) {
      R_.noalias() += term.d * term.d.adjoint();
      b_ += term.d * std::conj(term.c);
      constant_ += std::norm(term.c);
    }
  }
}

double PhaseQuadratic::value(const CVector& v) const {
  const CVector s = R_ * v.conjugate();
  return (v.transpose() * s)(0).real() - 2.0 * (v.transpose() * b_)(0).real() + constant_;
}

cd project_discrete(cd u, int bits) {
  if (bits < 1) throw std::invalid_argument("project_discrete: bits must be >= 1");
  const long levels = 1L << bits;
  const double step = kTwoPi / static_cast<double>(levels);
  double angle = std::arg(u);
  if (angle < 0.0) angle += kTwoPi;
  const double pos = angle / step;
  long k = static_cast<long>(std::floor(pos));
  const double frac = pos - static_cast<double>(k);
  constexpr double kTieTol = 1e-12;
  if (frac > 0.5 + kTieTol) {
    ++k;
  } else if (std::abs(frac - 0.5) <= kTieTol && k + 1 >= levels) {
    // tie between the last grid point and k = 0 (wrap-around)
    k = 0;
  }
  k %= levels;
  return std::polar(1.0, static_cast<double>(k) * step);
}

CVector PhaseQuadratic::coordinate_sweeps(CVector v, bool maximize, double tol, int max_sweeps,
                                          std::optional<int> phase_bits, int* sweeps_done) const {
  const int n = size();
  int sweeps = 0;
  double prev = value(v);
  for (; sweeps < max_sweeps && n > 0; ++sweeps) {
    CVector s = R_ * v.conjugate();
    for (int k = 0; k < n; ++k) {
      const cd old = v(k);
      const cd psi = s(k) - R_(k, k) * std::conj(old) - b_(k);
      // coordinate cost is 2 Re{v_k psi}
      cd next;
      if (psi == cd(0.0, 0.0)) {
        next = cd(1.0, 0.0);
      } else {
        const cd aligned = std::conj(psi) / std::abs(psi);
        next = maximize ? aligned : -aligned;
      }
      if (phase_bits) next = project_discrete(next, *phase_bits);
      const double cost_old = (old * psi).real();
      const double cost_new = (next * psi).real();
      if (maximize ? cost_new < cost_old : cost_new > cost_old) next = old;
      if (next != old) {
        s += R_.col(k) * (std::conj(next) - std::conj(old));
        v(k) = next;
      }
    }
    const double cur = value(v);
    const double change = maximize ? cur - prev : prev - cur;
    const double scale = std::abs(prev);
    prev = cur;
    if (scale == 0.0 || change <= tol * scale) {
      ++sweeps;
      break;
    }
  }
  if (sweeps_done) *sweeps_done = sweeps;
  return v;
}

}  // namespace irs_swipt
