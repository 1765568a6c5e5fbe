#include "irs_swipt/oracle.hpp"

#include <cmath>
#include <limits>

namespace irs_swipt {

std::pair<CVector, double> optimal_precoder_single_iu(const CVector& h, double gamma, double sigma2) {
  const double gain = h.squaredNorm();
  if (!(gain > 0.0)) throw std::domain_error("optimal_precoder_single_iu: zero channel, infeasible");
  if (!(gamma > 0.0) || !(sigma2 > 0.0)) {
    throw std::invalid_argument("optimal_precoder_single_iu: gamma and sigma2 must be > 0");
  }
  const CVector w = std::sqrt(gamma * sigma2) * h / gain;
  return {w, gamma * sigma2 / gain};
}

namespace {

// Effective channel h with h^H = sum_n conj(r_n) u_n F(n, :) + d^H, evaluated
// entry by entry.
CVector grid_effective(const CVector& d, const CVector& r, const CMatrix& F, const CVector& u) {
  CVector h = d;
  for (Eigen::Index m = 0; m < F.cols(); ++m) {
    cd row = 0.0;
    for (Eigen::Index n = 0; n < F.rows(); ++n) row += std::conj(r(n)) * u(n) * F(n, m);
    h(m) += std::conj(row);
  }
  return h;
}

}  // namespace

GridSearchResult grid_search_phases(const Problem& problem, int levels, const SolverParams& params) {
  problem.validate();
  if (levels < 1) throw std::invalid_argument("grid_search_phases: levels must be >= 1");
  const ChannelSet& cs = problem.channels;
  const int n = cs.N();
  if (std::pow(static_cast<double>(levels), n) > kGridSearchLimit) {
    throw std::length_error("grid_search_phases: grid exceeds the evaluation limit");
  }
  const bool analytic = problem.K_I() == 1 && problem.K_E() == 0;

  GridSearchResult best;
  best.power = std::numeric_limits<double>::infinity();
  std::vector<int> digits(n, 0);
  while (true) {
    RVector theta(n);
    CVector u(n);
    for (int e = 0; e < n; ++e) {
      theta(e) = kTwoPi * digits[e] / levels;
      u(e) = std::polar(1.0, theta(e));
    }
    double power;
    if (analytic) {
      const CVector h = grid_effective(cs.h_d[0], cs.h_r[0], cs.F, u);
      power = h.squaredNorm() > 0.0
                  ? optimal_precoder_single_iu(h, problem.targets.gamma(0), problem.noise.sigma2(0)).second
                  : std::numeric_limits<double>::infinity();
    } else {
      Problem p = problem;
      p.channels = ChannelSet{};
      p.channels.F = CMatrix(0, cs.M());
      for (int i = 0; i < cs.K_I(); ++i) {
        p.channels.h_d.push_back(grid_effective(cs.h_d[i], cs.h_r[i], cs.F, u));
        p.channels.h_r.emplace_back(0);
      }
      for (int j = 0; j < cs.K_E(); ++j) {
        p.channels.g_d.push_back(grid_effective(cs.g_d[j], cs.g_r[j], cs.F, u));
        p.channels.g_r.emplace_back(0);
      }
      const SolveReport r = solve(p, params);
      power = r.converged && r.feasibility.feasible ? r.power : std::numeric_limits<double>::infinity();
    }
    ++best.evaluations;
    if (power < best.power) {
      best.power = power;
      best.phases = PhaseShifts{theta};
    }
    int e = 0;
    while (e < n && ++digits[e] == levels) digits[e++] = 0;
    if (e == n) break;
  }
  if (n == 0) best.phases = PhaseShifts::zeros(0);
  return best;
}

std::pair<CVector, CVector> dual_bisection_eu(const CVector& s_bar, const CVector& t_bar, double e_min,
                                              double tol) {
  if (!(e_min > 0.0)) throw std::invalid_argument("dual_bisection_eu: e_min must be > 0");
  const double p = s_bar.squaredNorm() + t_bar.squaredNorm();
  if (p >= e_min) return {s_bar, t_bar};
  if (p == 0.0) throw std::domain_error("dual_bisection_eu: zero input has no unique projection");
  // Stationarity of ||z - z_bar||^2 - mu (||z||^2 - E): z = z_bar / (1 - mu);
  // the active constraint fixes mu in (0, 1).
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > tol) {
    const double mu = 0.5 * (lo + hi);
    const double scale = 1.0 / (1.0 - mu);
    if (p * scale * scale >= e_min) {
      hi = mu;
    } else {
      lo = mu;
    }
  }
  const double scale = 1.0 / (1.0 - hi);
  return {s_bar * scale, t_bar * scale};
}

}  // namespace irs_swipt
