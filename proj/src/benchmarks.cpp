#include "irs_swipt/benchmarks.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <limits>

namespace irs_swipt {

SolveReport solve_no_irs(const Problem& problem, const SolverParams& params) {
  Problem p = problem;
  p.channels = problem.channels.without_irs();
  return solve(p, params);
}

SolveReport solve_fixed_phase(const Problem& problem, const SolverParams& params) {
  problem.validate();
  const PhaseShifts zero = PhaseShifts::zeros(problem.channels.N());
  Problem p = problem;
  p.channels = freeze_phases(problem.channels, zero);
  SolveReport rep = solve(p, params);
  rep.sol.phases = zero;
  return rep;
}

double min_qos_margin(const BeamformingSolution& sol, const ChannelSet& cs, const QosTargets& targets,
                      const NoisePowers& noise) {
  const FeasibilityReport f = qos_feasibility(sol, cs, targets, noise);
  return f.min_margin();
}

namespace {

// Element-wise phase search at fixed precoders. Keeps, per user, the row of
// products with all beams [W V] and updates it by the single element's term.
PhaseShifts margin_phase_search(const ChannelSet& cs, const BeamformingSolution& sol,
                                const QosTargets& targets, const NoisePowers& noise,
                                const PhaseShifts& start, int levels, int max_sweeps) {
  const int n = cs.N();
  const int ki = cs.K_I();
  const int ke = cs.K_E();
  const auto nw = static_cast<int>(sol.W.cols());
  CMatrix beams(cs.M(), sol.W.cols() + sol.V.cols());
  beams << sol.W, sol.V;
  const CMatrix P = cs.F * beams;  // N x beams

  std::vector<const CVector*> refl;
  std::vector<CVector> rows;
  const EffectiveChannels eff = effective_channels(cs, start);
  for (int i = 0; i < ki; ++i) {
    refl.push_back(&cs.h_r[i]);
    rows.push_back((eff.h[i].adjoint() * beams).transpose());
  }
  for (int j = 0; j < ke; ++j) {
    refl.push_back(&cs.g_r[j]);
    rows.push_back((eff.g[j].adjoint() * beams).transpose());
  }

  auto margin_of = [&](int u, const CVector& y) {
    if (u < ki) {
      const double signal = std::norm(y(u));
      const double interference = y.head(nw).squaredNorm() - signal;
      return signal / (interference + noise.sigma2(u)) / targets.gamma(u);
    }
    return y.squaredNorm() / targets.e_min(u - ki);
  };

  PhaseShifts theta = start;
  const auto users = static_cast<int>(rows.size());
  std::vector<CVector> trial(users);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool changed = false;
    for (int e = 0; e < n; ++e) {
      const cd old_phasor = std::polar(1.0, theta.theta(e));
      double best = std::numeric_limits<double>::infinity();
      for (int u = 0; u < users; ++u) best = std::min(best, margin_of(u, rows[u]));
      int best_level = -1;
      for (int q = 0; q < levels; ++q) {
        const double angle = kTwoPi * q / levels;
        const cd delta = std::polar(1.0, angle) - old_phasor;
        double worst = std::numeric_limits<double>::infinity();
        for (int u = 0; u < users; ++u) {
          trial[u] = rows[u] + std::conj((*refl[u])(e)) * delta * P.row(e).transpose();
          worst = std::min(worst, margin_of(u, trial[u]));
        }
        if (worst > best) {
          best = worst;
          best_level = q;
        }
      }
      if (best_level >= 0) {
        const double angle = kTwoPi * best_level / levels;
        const cd delta = std::polar(1.0, angle) - old_phasor;
        for (int u = 0; u < users; ++u) rows[u] += std::conj((*refl[u])(e)) * delta * P.row(e).transpose();
        theta.theta(e) = angle;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return theta;
}

}  // namespace

SolveReport solve_alternating(const Problem& problem, const SolverParams& params, const AlternatingParams& alt) {
  problem.validate();
  if (alt.max_rounds < 1 || alt.phase_levels < 2 || alt.max_phase_sweeps < 1) {
    throw std::invalid_argument("solve_alternating: invalid parameters");
  }
  const ChannelSet& cs = problem.channels;
  const int levels = params.phase_bits ? (1 << *params.phase_bits) : alt.phase_levels;

  PhaseShifts theta = PhaseShifts::zeros(cs.N());
  SolveReport best;
  bool have = false;
  SolveReport last;
  int outer = 0;
  int inner = 0;
  for (int round = 0; round < alt.max_rounds; ++round) {
    Problem p = problem;
    p.channels = freeze_phases(cs, theta);
    SolveReport r = solve(p, params);
    outer += r.outer_iters;
    inner += r.inner_iters_total;
    r.sol.phases = theta;
    r.feasibility = qos_feasibility(r.sol, cs, problem.targets, problem.noise, params.feasibility_tol);
    const bool ok = r.converged && r.feasibility.feasible;
    if (ok) {
      if (have && r.power >= best.power) break;
      const double decrease = have ? (best.power - r.power) / best.power : 1.0;
      best = std::move(r);
      have = true;
      if (decrease < params.eps1) break;
    } else {
      last = std::move(r);
    }
    if (cs.N() == 0) break;
    const BeamformingSolution& src = have ? best.sol : last.sol;
    BeamformingSolution at_theta = src;
    at_theta.phases = theta;
    const PhaseShifts next =
        margin_phase_search(cs, at_theta, problem.targets, problem.noise, theta, levels, alt.max_phase_sweeps);
    if (next.theta == theta.theta) break;
    theta = next;
  }
  SolveReport out = have ? std::move(best) : std::move(last);
  out.outer_iters = outer;
  out.inner_iters_total = inner;
  out.converged = have;
  return out;
}

CMatrix direct_nullspace(const ChannelSet& cs) {
  const int m = cs.M();
  const int ki = cs.K_I();
  if (ki == 0) return CMatrix::Identity(m, m);
  CMatrix H(ki, m);
  for (int i = 0; i < ki; ++i) H.row(i) = cs.h_d[i].adjoint();
  Eigen::JacobiSVD<CMatrix> svd(H, Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  const double cutoff = s(0) * 1e-12 * m;
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) rank += s(k) > cutoff ? 1 : 0;
  return svd.matrixV().rightCols(m - rank);
}

SolveReport solve_separate_beams(const Problem& problem, const SolverParams& params) {
  problem.validate();
  const ChannelSet& cs = problem.channels;
  const int m = cs.M();
  const int ki = problem.K_I();
  const int ke = problem.K_E();
  if (ki >= m) throw std::invalid_argument("solve_separate_beams: requires K_I < M");

  SolveReport info;
  CMatrix W = CMatrix::Zero(m, 0);
  if (ki > 0) {
    Problem p1;
    p1.channels.h_d = cs.h_d;
    p1.channels.h_r.assign(ki, CVector(0));
    p1.channels.F = CMatrix(0, m);
    p1.targets.gamma = problem.targets.gamma;
    p1.targets.e_min = RVector(0);
    p1.noise = problem.noise;
    p1.energy_beams_enabled = false;
    info = solve(p1, params);
    W = info.sol.W;
  }

  SolveReport rep;
  if (ke > 0) {
    Problem p2 = problem;
    p2.energy_beams_enabled = true;
    p2.structure.fixed_information_beams = W;
    p2.structure.energy_subspace = direct_nullspace(cs);
    rep = solve(p2, params);
    rep.outer_iters += info.outer_iters;
    rep.inner_iters_total += info.inner_iters_total;
    rep.converged = rep.converged && (ki == 0 || info.converged);
  } else {
    rep = std::move(info);
    rep.sol.V = CMatrix::Zero(m, 0);
    rep.sol.phases = PhaseShifts::zeros(cs.N());
  }
  rep.power = transmit_power(rep.sol);
  rep.feasibility = qos_feasibility(rep.sol, cs, problem.targets, problem.noise, params.feasibility_tol);
  return rep;
}

int count_energy_beams(const CMatrix& V, double rel_threshold) {
  if (!(rel_threshold > 0.0 && rel_threshold < 1.0)) {
    throw std::invalid_argument("count_energy_beams: rel_threshold must lie in (0, 1)");
  }
  if (V.cols() == 0) return 0;
  const CMatrix cov = V * V.adjoint();
  const double trace = cov.trace().real();
  if (trace <= 0.0) return 0;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(cov, Eigen::EigenvaluesOnly);
  int count = 0;
  for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
    count += eig.eigenvalues()(k) > rel_threshold * trace ? 1 : 0;
  }
  return count;
}

}  // namespace irs_swipt
