#include "irs_swipt/penalty_solver.hpp"

#include "irs_swipt/rng.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace irs_swipt {

void SolverParams::validate() const {
  if (!(reference_gain >= 0.0) || !(reference_gain_fixed_channels >= 0.0)) {
    throw std::invalid_argument("SolverParams: reference gains must be >= 0");
  }
  if (!(rho0 > 0.0)) throw std::invalid_argument("SolverParams: rho0 must be > 0");
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("SolverParams: c must lie in (0, 1)");
  if (!(eps1 > 0.0) || !(eps2 > 0.0) || !(eps3 > 0.0)) {
    throw std::invalid_argument("SolverParams: eps1, eps2, eps3 must be > 0");
  }
  if (max_inner < 1 || max_outer < 1 || max_phase_sweeps < 1) {
    throw std::invalid_argument("SolverParams: iteration caps must be >= 1");
  }
  if (phase_bits && *phase_bits < 1) throw std::invalid_argument("SolverParams: phase_bits must be >= 1");
}

void Problem::validate() const {
  channels.validate();
  const int ki = K_I();
  const int ke = K_E();
  if (ki + ke == 0) throw std::invalid_argument("Problem: no users");
  if (targets.gamma.size() != ki || targets.e_min.size() != ke) {
    throw std::invalid_argument("Problem: QoS target count does not match the user count");
  }
  targets.validate();
  if (noise.sigma2.size() != ki) throw std::invalid_argument("Problem: noise count != K_I");
  for (int i = 0; i < ki; ++i) {
    if (!(noise.sigma2(i) > 0.0)) throw std::invalid_argument("Problem: sigma2 must be > 0");
  }
  if (ke > 0 && !energy_beams_enabled && ki == 0) {
    throw std::invalid_argument("Problem: energy users without information or energy beams");
  }
  if (const auto& W = structure.fixed_information_beams) {
    if (W->rows() != channels.M() || W->cols() != ki) {
      throw std::invalid_argument("Problem: fixed information beams must be M x K_I");
    }
    if (num_energy_beams() == 0) throw std::invalid_argument("Problem: nothing left to optimize");
  }
  if (const auto& B = structure.energy_subspace) {
    if (B->rows() != channels.M() || B->cols() < 1) {
      throw std::invalid_argument("Problem: energy subspace must have M rows and >= 1 column");
    }
    const CMatrix gram = B->adjoint() * *B;
    if (!gram.isIdentity(1e-9)) throw std::invalid_argument("Problem: energy subspace not orthonormal");
  }
}

Problem normalized(const Problem& problem, double reference_gain, double* precoder_scale) {
  Problem out = problem;
  for (int i = 0; i < problem.K_I(); ++i) {
    const double level = kNormalizedRequiredLevel / problem.targets.gamma(i);
    const double scale = std::sqrt(level / problem.noise.sigma2(i));
    out.channels.h_d[i] *= scale;
    out.channels.h_r[i] *= scale;
    out.noise.sigma2(i) = level;
  }
  for (int j = 0; j < problem.K_E(); ++j) {
    const double scale = std::sqrt(kNormalizedRequiredLevel / problem.targets.e_min(j));
    out.channels.g_d[j] *= scale;
    out.channels.g_r[j] *= scale;
    out.targets.e_min(j) = kNormalizedRequiredLevel;
  }
  double s = 1.0;
  if (reference_gain > 0.0) {
    // w = s w' with s chosen so that the mean effective gain at zero phase is
    // reference_gain
    const EffectiveChannels eff = effective_channels(out.channels, PhaseShifts::zeros(out.channels.N()));
    double mean = 0.0;
    for (const auto& h : eff.h) mean += h.squaredNorm();
    for (const auto& g : eff.g) mean += g.squaredNorm();
    mean /= static_cast<double>(eff.h.size() + eff.g.size());
    if (mean > 0.0 && std::isfinite(mean)) s = std::sqrt(reference_gain / mean);
    for (auto* group : {&out.channels.h_d, &out.channels.h_r, &out.channels.g_d, &out.channels.g_r}) {
      for (auto& v : *group) v *= s;
    }
    if (out.structure.fixed_information_beams) *out.structure.fixed_information_beams /= s;
  }
  if (precoder_scale) *precoder_scale = s;
  return out;
}

namespace {

using ld = long double;
using cld = std::complex<long double>;

cld to_ld(cd z) { return {z.real(), z.imag()}; }

// Effective channel in extended precision, so that the monotonicity check of
// the inner loop is not dominated by evaluation round-off.
std::vector<cld> effective_ld(const CVector& direct, const CVector& reflected, const CMatrix& F,
                              const std::vector<cld>& u) {
  std::vector<cld> h(static_cast<std::size_t>(direct.size()));
  for (Eigen::Index m = 0; m < direct.size(); ++m) {
    cld acc = to_ld(direct(m));
    for (Eigen::Index n = 0; n < F.rows(); ++n) {
      acc += std::conj(to_ld(F(n, m))) * to_ld(reflected(n)) * std::conj(u[n]);
    }
    h[m] = acc;
  }
  return h;
}

// h^H w in extended precision
cld inner_ld(const std::vector<cld>& h, const auto& w) {
  cld acc = 0;
  for (std::size_t m = 0; m < h.size(); ++m) acc += std::conj(h[m]) * to_ld(w(static_cast<Eigen::Index>(m)));
  return acc;
}

CMatrix tikhonov_solve(const CMatrix& A, const CMatrix& rhs, double rho) {
  // argmin_w ||w||^2 + (1/2rho) ||A w - rhs||^2, columnwise:
  // w = (2 rho I + A^H A)^{-1} A^H rhs, evaluated through the SVD of A.
  if (A.rows() == 0 || rhs.cols() == 0) return CMatrix::Zero(A.cols(), rhs.cols());
  Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  const RVector filt = (s.array() / (s.array().square() + 2.0 * rho)).matrix();
  return svd.matrixV() * (filt.asDiagonal() * (svd.matrixU().adjoint() * rhs));
}

void update_precoders_structured(const Problem& problem, const EffectiveChannels& eff,
                                 const AuxiliaryVariables& aux, double rho, CMatrix& W, CMatrix& V) {
  const int m = problem.channels.M();
  const int ki = problem.K_I();
  const int ke = problem.K_E();
  if (problem.optimizes_information_beams()) {
    CMatrix A(ki + ke, m);
    CMatrix rhs(ki + ke, ki);
    for (int k = 0; k < ki; ++k) A.row(k) = eff.h[k].adjoint();
    for (int j = 0; j < ke; ++j) A.row(ki + j) = eff.g[j].adjoint();
    if (ki > 0) {
      rhs.topRows(ki) = aux.x;
      if (ke > 0) rhs.bottomRows(ke) = aux.s;
    }
    W = tikhonov_solve(A, rhs, rho);
  } else {
    W = *problem.structure.fixed_information_beams;
  }
  const int nb = problem.num_energy_beams();
  if (nb == 0) {
    V = CMatrix(m, 0);
    return;
  }
  CMatrix A(ke, m);
  for (int j = 0; j < ke; ++j) A.row(j) = eff.g[j].adjoint();
  if (const auto& B = problem.structure.energy_subspace) {
    V = *B * tikhonov_solve(A * *B, aux.t, rho);
  } else {
    V = tikhonov_solve(A, aux.t, rho);
  }
}

bool sinr_row_feasible(const CVector& x, int i, double gamma, double sigma2) {
  const double interference = x.squaredNorm() - std::norm(x(i));
  return std::norm(x(i)) >= gamma * (interference + sigma2);
}

ld row_distance(const std::vector<cld>& exact, const CVector& row) {
  ld d = 0;
  for (std::size_t k = 0; k < exact.size(); ++k) d += std::norm(exact[k] - to_ld(row(static_cast<Eigen::Index>(k))));
  return d;
}

void update_auxiliaries(const Problem& problem, const EffectiveChannels& eff, const PhaseShifts& phases,
                        const CMatrix& W, const CMatrix& V, AuxiliaryVariables& aux, double eps3) {
  const ChannelSet& cs = problem.channels;
  const int ke = problem.K_E();
  const auto info = static_cast<int>(W.cols());
  std::vector<cld> u(static_cast<std::size_t>(cs.N()));
  for (int n = 0; n < cs.N(); ++n) u[n] = std::polar<ld>(1.0L, static_cast<ld>(phases.theta(n)));
  // The keep-old guards compare distances in the precision of
  // penalized_objective, so that a rounding-level change of a row cannot
  // raise the evaluated objective.
  for (Eigen::Index i = 0; i < aux.x.rows(); ++i) {
    CVector x_bar(info);
    for (int k = 0; k < info; ++k) x_bar(k) = eff.h[i].dot(W.col(k));
    const int ii = static_cast<int>(i);
    const double gamma = problem.targets.gamma(i);
    const double sigma2 = problem.noise.sigma2(i);
    CVector next = update_aux_iu(x_bar, ii, gamma, sigma2, eps3);
    const CVector old = aux.x.row(i).transpose();
    if (sinr_row_feasible(old, ii, gamma, sigma2)) {
      const auto h = effective_ld(cs.h_d[i], cs.h_r[i], cs.F, u);
      std::vector<cld> exact(static_cast<std::size_t>(info));
      for (int k = 0; k < info; ++k) exact[k] = inner_ld(h, W.col(k));
      if (row_distance(exact, old) <= row_distance(exact, next)) next = old;
    }
    aux.x.row(i) = next.transpose();
  }
  for (int j = 0; j < ke; ++j) {
    CVector s_bar(info);
    CVector t_bar(V.cols());
    for (int i = 0; i < info; ++i) s_bar(i) = eff.g[j].dot(W.col(i));
    for (Eigen::Index mm = 0; mm < V.cols(); ++mm) t_bar(mm) = eff.g[j].dot(V.col(mm));
    auto [s, t] = update_aux_eu(s_bar, t_bar, problem.targets.e_min(j), j);
    const CVector s_old = aux.s.row(j).transpose();
    const CVector t_old = aux.t.row(j).transpose();
    if (s_old.squaredNorm() + t_old.squaredNorm() >= problem.targets.e_min(j)) {
      const auto g = effective_ld(cs.g_d[j], cs.g_r[j], cs.F, u);
      std::vector<cld> es(static_cast<std::size_t>(info));
      std::vector<cld> et(static_cast<std::size_t>(V.cols()));
      for (int i = 0; i < info; ++i) es[i] = inner_ld(g, W.col(i));
      for (Eigen::Index mm = 0; mm < V.cols(); ++mm) et[mm] = inner_ld(g, V.col(mm));
      if (row_distance(es, s_old) + row_distance(et, t_old) <= row_distance(es, s) + row_distance(et, t)) continue;
    }
    aux.s.row(j) = s.transpose();
    aux.t.row(j) = t.transpose();
  }
}

bool aux_feasible(const Problem& problem, const AuxiliaryVariables& aux) {
  for (Eigen::Index i = 0; i < aux.x.rows(); ++i) {
    const CVector row = aux.x.row(i).transpose();
    if (!sinr_row_feasible(row, static_cast<int>(i), problem.targets.gamma(i), problem.noise.sigma2(i))) {
      return false;
    }
  }
  for (Eigen::Index j = 0; j < aux.s.rows(); ++j) {
    if (aux.s.row(j).squaredNorm() + aux.t.row(j).squaredNorm() < problem.targets.e_min(j)) return false;
  }
  return true;
}

}  // namespace

SolverState init_state(const Problem& problem, const SolverParams& params) {
  params.validate();
  const int m = problem.channels.M();
  const int ki = problem.K_I();
  const int ke = problem.K_E();
  const int nb = problem.num_energy_beams();
  const int x_rows = problem.optimizes_information_beams() ? ki : 0;

  SolverState st;
  st.sol.phases = PhaseShifts::zeros(problem.channels.N());
  st.sol.W = problem.optimizes_information_beams() ? CMatrix::Zero(m, ki)
                                                   : *problem.structure.fixed_information_beams;
  st.sol.V = CMatrix::Zero(m, nb);
  st.rho = params.rho0;

  auto draw = [&](Eigen::Index rows, Eigen::Index cols, std::uint64_t index) {
    Rng rng(params.seed, StreamTag::AuxInit, index);
    CMatrix out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = rng.complex_normal();
    }
    return out;
  };
  st.aux.x = draw(x_rows, x_rows, 0);
  st.aux.s = draw(ke, ki, 1);
  st.aux.t = draw(ke, nb, 2);
  st.penalized_objective = penalized_objective(problem, st.sol, st.aux, st.rho);
  return st;
}

std::pair<CMatrix, CMatrix> update_precoders(const EffectiveChannels& eff,
                                             const AuxiliaryVariables& aux, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("update_precoders: rho must be > 0");
  const auto ki = static_cast<int>(eff.h.size());
  const auto ke = static_cast<int>(eff.g.size());
  const Eigen::Index m = ki > 0 ? eff.h[0].size() : eff.g[0].size();
  if (!aux.x.allFinite() || !aux.s.allFinite() || !aux.t.allFinite()) {
    throw std::domain_error("update_precoders: non-finite auxiliary variables");
  }
  CMatrix A(ki + ke, m);
  CMatrix rhs = CMatrix::Zero(ki + ke, ki);
  for (int k = 0; k < ki; ++k) A.row(k) = eff.h[k].adjoint();
  for (int j = 0; j < ke; ++j) A.row(ki + j) = eff.g[j].adjoint();
  if (ki > 0) {
    rhs.topRows(ki) = aux.x;
    if (ke > 0) rhs.bottomRows(ke) = aux.s;
  }
  CMatrix W = tikhonov_solve(A, rhs, rho);
  CMatrix V;
  if (aux.t.cols() == 0) {
    V = CMatrix(m, 0);
  } else {
    V = tikhonov_solve(A.bottomRows(ke), aux.t, rho);
  }
  if (!W.allFinite() || !V.allFinite()) throw std::domain_error("update_precoders: non-finite result");
  return {W, V};
}

double precoder_block_objective(const EffectiveChannels& eff, const AuxiliaryVariables& aux,
                                const CMatrix& W, const CMatrix& V, double rho) {
  double penalty = 0.0;
  for (Eigen::Index i = 0; i < aux.x.rows(); ++i) {
    for (Eigen::Index k = 0; k < aux.x.cols(); ++k) penalty += std::norm(eff.h[i].dot(W.col(k)) - aux.x(i, k));
  }
  for (Eigen::Index j = 0; j < aux.s.rows(); ++j) {
    for (Eigen::Index i = 0; i < aux.s.cols(); ++i) penalty += std::norm(eff.g[j].dot(W.col(i)) - aux.s(j, i));
    for (Eigen::Index mm = 0; mm < aux.t.cols(); ++mm) penalty += std::norm(eff.g[j].dot(V.col(mm)) - aux.t(j, mm));
  }
  return W.squaredNorm() + V.squaredNorm() + penalty / (2.0 * rho);
}

PenaltyVectors penalty_vectors(const ChannelSet& cs, const CMatrix& W, const CMatrix& V,
                               const AuxiliaryVariables& aux) {
  PenaltyVectors pv;
  pv.n = cs.N();
  pv.iu_rows = static_cast<int>(aux.x.rows());
  pv.info_beams = static_cast<int>(W.cols());
  pv.eu_rows = cs.K_E();
  pv.energy_beams = static_cast<int>(V.cols());
  const CMatrix FW = cs.F * W;
  const CMatrix FV = cs.F * V;
  for (int i = 0; i < pv.iu_rows; ++i) {
    const CVector hr = cs.h_r[i].conjugate();
    for (int k = 0; k < pv.info_beams; ++k) {
      pv.iu_info.push_back({hr.cwiseProduct(FW.col(k)), aux.x(i, k) - cs.h_d[i].dot(W.col(k))});
    }
  }
  for (int j = 0; j < pv.eu_rows; ++j) {
    const CVector gr = cs.g_r[j].conjugate();
    for (int i = 0; i < pv.info_beams; ++i) {
      pv.eu_info.push_back({gr.cwiseProduct(FW.col(i)), aux.s(j, i) - cs.g_d[j].dot(W.col(i))});
    }
    for (int mm = 0; mm < pv.energy_beams; ++mm) {
      pv.eu_energy.push_back({gr.cwiseProduct(FV.col(mm)), aux.t(j, mm) - cs.g_d[j].dot(V.col(mm))});
    }
  }
  return pv;
}

double phase_objective(const PenaltyVectors& pv, const PhaseShifts& phases) {
  const CVector v = phases.unit();
  double f = 0.0;
  for (const auto* group : {&pv.iu_info, &pv.eu_info, &pv.eu_energy}) {
    for (const auto& term : *group) f += std::norm((v.transpose() * term.d)(0) - term.c);
  }
  return f;
}

PhaseShifts update_phase_shifts(const PenaltyVectors& pv, const PhaseShifts& current,
                                const PhaseUpdateParams& params) {
  if (pv.n == 0) return current;
  const PhaseQuadratic form(pv.n, {&pv.iu_info, &pv.eu_info, &pv.eu_energy});
  const CVector v = form.coordinate_sweeps(current.unit(), false, params.eps1, params.max_sweeps,
                                           params.phase_bits);
  return PhaseShifts::from_unit(v);
}

namespace {

// Closed forms can land a few ulps on the infeasible side; grow z until
// `ok` holds in floating point.
template <class Pred>
void nudge_until(cd& z, Pred ok) {
  for (int k = 0; k < 8 && !ok(); ++k) z *= 1.0 + 4.0 * std::numeric_limits<double>::epsilon();
}

}  // namespace

CVector update_aux_iu(const CVector& x_bar, int i, double gamma, double sigma2, double eps3) {
  if (!(gamma > 0.0) || !(sigma2 > 0.0) || !(eps3 > 0.0)) {
    throw std::invalid_argument("update_aux_iu: gamma, sigma2, eps3 must be > 0");
  }
  const double own = std::norm(x_bar(i));
  const double interference = x_bar.squaredNorm() - own;
  if (own >= gamma * (interference + sigma2)) return x_bar;

  auto zero_signal_branch = [&](cd direction) {
    CVector x = x_bar / (1.0 + gamma);
    x(i) = 0.0;
    x(i) = direction * std::sqrt(gamma * (x.squaredNorm() + sigma2));
    nudge_until(x(i), [&] { return sinr_row_feasible(x, i, gamma, sigma2); });
    return x;
  };
  if (own == 0.0) return zero_signal_branch(cd(1.0, 0.0));

  auto G = [&](double lambda) {
    double g = own / ((1.0 - lambda) * (1.0 - lambda)) - gamma * sigma2;
    const double shrink = (1.0 + lambda * gamma) * (1.0 + lambda * gamma);
    for (Eigen::Index k = 0; k < x_bar.size(); ++k) {
      if (k != i) g -= gamma * std::norm(x_bar(k)) / shrink;
    }
    return g;
  };
  double lo = 0.0;
  double hi = 1.0 - 1e-12;
  if (!(G(hi) > 0.0)) {
    // |x_bar_ii| below ~1e-12 of the required level: same as a zero signal
    return zero_signal_branch(x_bar(i) / std::abs(x_bar(i)));
  }
  // relative accuracy eps3 on the scale factor 1 / (1 - lambda); hi stays on
  // the feasible side G >= 0
  while (hi - lo > eps3 * (1.0 - hi)) {
    const double mid = 0.5 * (lo + hi);
    if (G(mid) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  CVector x = x_bar / (1.0 + hi * gamma);
  x(i) = x_bar(i) / (1.0 - hi);
  nudge_until(x(i), [&] { return sinr_row_feasible(x, i, gamma, sigma2); });
  return x;
}

std::pair<CVector, CVector> update_aux_eu(const CVector& s_bar, const CVector& t_bar, double e_min, int j) {
  if (!(e_min > 0.0)) throw std::invalid_argument("update_aux_eu: e_min must be > 0");
  const double power = s_bar.squaredNorm() + t_bar.squaredNorm();
  if (power >= e_min) return {s_bar, t_bar};
  if (power == 0.0) {
    CVector s = CVector::Zero(s_bar.size());
    CVector t = CVector::Zero(t_bar.size());
    if (t.size() > 0) {
      t(j < t.size() ? j : 0) = std::sqrt(e_min);
    } else if (s.size() > 0) {
      s(0) = std::sqrt(e_min);
    } else {
      throw std::invalid_argument("update_aux_eu: empty row");
    }
    return {s, t};
  }
  double scale = std::sqrt(e_min / power);
  CVector s = s_bar * scale;
  CVector t = t_bar * scale;
  for (int k = 0; k < 8 && s.squaredNorm() + t.squaredNorm() < e_min; ++k) {
    scale *= 1.0 + 4.0 * std::numeric_limits<double>::epsilon();
    s = s_bar * scale;
    t = t_bar * scale;
  }
  return {s, t};
}

double penalized_objective(const Problem& problem, const BeamformingSolution& sol,
                           const AuxiliaryVariables& aux, double rho) {
  const ChannelSet& cs = problem.channels;
  std::vector<cld> u(static_cast<std::size_t>(cs.N()));
  for (int n = 0; n < cs.N(); ++n) u[n] = std::polar<ld>(1.0L, static_cast<ld>(sol.phases.theta(n)));

  ld penalty = 0;
  for (Eigen::Index i = 0; i < aux.x.rows(); ++i) {
    const auto h = effective_ld(cs.h_d[i], cs.h_r[i], cs.F, u);
    for (Eigen::Index k = 0; k < aux.x.cols(); ++k) penalty += std::norm(inner_ld(h, sol.W.col(k)) - to_ld(aux.x(i, k)));
  }
  for (Eigen::Index j = 0; j < aux.s.rows(); ++j) {
    const auto g = effective_ld(cs.g_d[j], cs.g_r[j], cs.F, u);
    for (Eigen::Index i = 0; i < aux.s.cols(); ++i) penalty += std::norm(inner_ld(g, sol.W.col(i)) - to_ld(aux.s(j, i)));
    for (Eigen::Index mm = 0; mm < aux.t.cols(); ++mm) penalty += std::norm(inner_ld(g, sol.V.col(mm)) - to_ld(aux.t(j, mm)));
  }
  ld power = 0;
  for (Eigen::Index c = 0; c < sol.W.size(); ++c) power += std::norm(to_ld(sol.W.data()[c]));
  for (Eigen::Index c = 0; c < sol.V.size(); ++c) power += std::norm(to_ld(sol.V.data()[c]));
  return static_cast<double>(power + penalty / (2.0L * static_cast<ld>(rho)));
}

int inner_bcd(SolverState& state, const Problem& problem, const SolverParams& params) {
  const ChannelSet& cs = problem.channels;
  const PhaseUpdateParams phase_params{params.eps1, params.max_phase_sweeps, params.phase_bits};
  double prev = penalized_objective(problem, state.sol, state.aux, state.rho);
  // descent is guaranteed once the aux point is feasible; the random start
  // usually is not, so the first iteration is then exempt from both checks
  bool from_feasible = aux_feasible(problem, state.aux);
  int it = 0;
  while (it < params.max_inner) {
    ++it;
    EffectiveChannels eff = effective_channels(cs, state.sol.phases);
    update_precoders_structured(problem, eff, state.aux, state.rho, state.sol.W, state.sol.V);
    if (cs.N() > 0) {
      const PenaltyVectors pv = penalty_vectors(cs, state.sol.W, state.sol.V, state.aux);
      state.sol.phases = update_phase_shifts(pv, state.sol.phases, phase_params);
      eff = effective_channels(cs, state.sol.phases);
    }
    update_auxiliaries(problem, eff, state.sol.phases, state.sol.W, state.sol.V, state.aux, params.eps3);

    const double cur = penalized_objective(problem, state.sol, state.aux, state.rho);
    state.history.objective.push_back(cur);
    const double slack = 10.0 * std::numeric_limits<double>::epsilon() * std::abs(prev);
    if (params.check_monotone && from_feasible && cur > prev + slack) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "penalized objective increased at rho=" << state.rho << ": " << prev << " -> " << cur;
      throw InvariantViolation(msg.str());
    }
    const double decrease = prev > 0.0 ? (prev - cur) / prev : 0.0;
    prev = cur;
    if (from_feasible && decrease < params.eps1) break;
    from_feasible = true;
  }
  state.penalized_objective = prev;
  return it;
}

SolveReport solve(const Problem& problem, const SolverParams& params) {
  problem.validate();
  params.validate();
  double scale = 1.0;
  const double gain = problem.channels.N() > 0 ? params.reference_gain : params.reference_gain_fixed_channels;
  const Problem np = normalized(problem, gain, &scale);
  SolverState st = init_state(np, params);

  SolveReport rep;
  double xi = std::numeric_limits<double>::infinity();
  for (int outer = 0; outer < params.max_outer; ++outer) {
    st.history.rho.push_back(st.rho);
    const int inner = inner_bcd(st, np, params);
    rep.inner_iters_total += inner;
    ++rep.outer_iters;
    const EffectiveChannels eff = effective_channels(np.channels, st.sol.phases);
    xi = constraint_violation(eff, st.sol.W, st.sol.V, st.aux);
    st.history.xi.push_back(xi);
    st.history.power.push_back(scale * scale * transmit_power(st.sol));
    st.history.inner_iters.push_back(inner);
    if (xi <= params.eps2) {
      rep.converged = true;
      break;
    }
    st.rho *= params.c;
  }
  rep.sol = st.sol;
  rep.sol.W *= scale;
  rep.sol.V *= scale;
  if (problem.structure.fixed_information_beams) rep.sol.W = *problem.structure.fixed_information_beams;
  rep.power = transmit_power(rep.sol);
  rep.xi_final = xi;
  rep.feasibility = qos_feasibility(rep.sol, problem.channels, problem.targets, problem.noise,
                                    params.feasibility_tol);
  rep.traces = std::move(st.history);
  return rep;
}

}  // namespace irs_swipt
