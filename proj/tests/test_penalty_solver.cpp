#include "irs_swipt/oracle.hpp"
#include "irs_swipt/penalty_solver.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace irs_swipt;
using irs_swipt::testing::synthetic_problem;

namespace {

double g_of_lambda(const CVector& x_bar, int i, double gamma, double sigma2, double lambda) {
  double g = std::norm(x_bar(i)) / ((1.0 - lambda) * (1.0 - lambda)) - gamma * sigma2;
  for (Eigen::Index k = 0; k < x_bar.size(); ++k) {
    if (k != i) g -= gamma * std::norm(x_bar(k)) / ((1.0 + lambda * gamma) * (1.0 + lambda * gamma));
  }
  return g;
}

bool sinr_row_ok(const CVector& x, int i, double gamma, double sigma2, double rel) {
  const double own = std::norm(x(i));
  const double rest = x.squaredNorm() - own;
  return own >= gamma * (rest + sigma2) * (1.0 - rel);
}

AuxiliaryVariables random_aux(std::uint64_t seed, int ki, int ke, int nb) {
  Rng rng(seed, StreamTag::AuxInit, 77);
  auto draw = [&](int r, int c) {
    CMatrix m(r, c);
    for (int a = 0; a < r; ++a) {
      for (int b = 0; b < c; ++b) m(a, b) = rng.complex_normal();
    }
    return m;
  };
  return {draw(ki, ki), draw(ke, ki), draw(ke, nb)};
}

}  // namespace

TEST_CASE("init_state: zero phases, seeded aux, rho0") {
  const Problem p = synthetic_problem(1, 3, 4, 2, 2);
  const SolverParams params;
  const SolverState a = init_state(p, params);
  const SolverState b = init_state(p, params);
  CHECK(a.aux.x == b.aux.x);
  CHECK(a.aux.s == b.aux.s);
  CHECK(a.aux.t == b.aux.t);
  CHECK(a.sol.phases.theta.isZero());
  CHECK((a.sol.phases.unit() - CVector::Ones(4)).norm() == 0.0);
  CHECK(a.rho == 1000.0);
  CHECK(a.sol.W.isZero());
  CHECK(a.sol.V.isZero());
  SolverParams other;
  other.seed = 9;
  CHECK(init_state(p, other).aux.x != a.aux.x);
}

TEST_CASE("update_precoders: trivial cases") {
  EffectiveChannels eff;
  eff.h = {CVector::Ones(1)};
  AuxiliaryVariables aux{CMatrix::Ones(1, 1), CMatrix(0, 1), CMatrix(0, 0)};
  auto [W, V] = update_precoders(eff, aux, 0.5);
  CHECK(W(0, 0).real() == doctest::Approx(0.5));
  CHECK(W(0, 0).imag() == doctest::Approx(0.0));

  const Problem p = synthetic_problem(2, 3, 0, 2, 2);
  const EffectiveChannels e2 = effective_channels(p.channels, PhaseShifts::zeros(0));
  AuxiliaryVariables zero{CMatrix::Zero(2, 2), CMatrix::Zero(2, 2), CMatrix::Zero(2, 2)};
  auto [W0, V0] = update_precoders(e2, zero, 3.0);
  CHECK(W0.isZero());
  CHECK(V0.isZero());
  CHECK_THROWS_AS(update_precoders(e2, zero, 0.0), std::invalid_argument);
}

TEST_CASE("update_precoders: zero gradient against finite differences") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Problem p = synthetic_problem(seed, 4, 3, 2, 2, 10.0, 1.0, 1.0, 1.0);
    const PhaseShifts ph{RVector::LinSpaced(3, 0.3, 2.0)};
    const EffectiveChannels eff = effective_channels(p.channels, ph);
    const AuxiliaryVariables aux = random_aux(seed, 2, 2, 2);
    const double rho = 0.7;
    auto [W, V] = update_precoders(eff, aux, rho);
    const double f0 = precoder_block_objective(eff, aux, W, V, rho);
    // perturbing any real or imaginary entry must not decrease the convex
    // objective at first order
    const double h = 1e-5;
    double max_grad = 0.0;
    for (int blk = 0; blk < 2; ++blk) {
      CMatrix& M = blk == 0 ? W : V;
      for (Eigen::Index e = 0; e < M.size(); ++e) {
        for (cd dir : {cd(1.0, 0.0), cd(0.0, 1.0)}) {
          const cd saved = M.data()[e];
          M.data()[e] = saved + h * dir;
          const double fp = precoder_block_objective(eff, aux, W, V, rho);
          M.data()[e] = saved - h * dir;
          const double fm = precoder_block_objective(eff, aux, W, V, rho);
          M.data()[e] = saved;
          max_grad = std::max(max_grad, std::abs(fp - fm) / (2.0 * h));
        }
      }
    }
    CHECK(max_grad <= 1e-5 * std::max(1.0, f0));
  }
}

TEST_CASE("penalty_vectors reproduce the bilinear residuals") {
  const Problem p = synthetic_problem(3, 3, 5, 2, 2, 10.0, 1.0, 1.0, 1.0);
  const AuxiliaryVariables aux = random_aux(4, 2, 2, 2);
  const CMatrix W = random_aux(5, 3, 0, 0).x.leftCols(2);
  const CMatrix V = random_aux(6, 3, 0, 0).x.rightCols(2);
  const PhaseShifts ph{RVector::LinSpaced(5, 0.1, 5.0)};
  const PenaltyVectors pv = penalty_vectors(p.channels, W, V, aux);
  const EffectiveChannels eff = effective_channels(p.channels, ph);
  const CVector u = ph.unit();
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      const auto& t = pv.iu_info[i * 2 + k];
      const cd lhs = eff.h[i].dot(W.col(k)) - aux.x(i, k);
      const cd rhs = (u.transpose() * t.d)(0) - t.c;
      CHECK(std::abs(lhs - rhs) < 1e-12);
    }
  }
  for (int j = 0; j < 2; ++j) {
    for (int m = 0; m < 2; ++m) {
      const auto& ti = pv.eu_info[j * 2 + m];
      CHECK(std::abs(eff.g[j].dot(W.col(m)) - aux.s(j, m) - ((u.transpose() * ti.d)(0) - ti.c)) < 1e-12);
      const auto& te = pv.eu_energy[j * 2 + m];
      CHECK(std::abs(eff.g[j].dot(V.col(m)) - aux.t(j, m) - ((u.transpose() * te.d)(0) - te.c)) < 1e-12);
    }
  }
  double direct = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) direct += std::norm(eff.h[i].dot(W.col(k)) - aux.x(i, k));
  }
  for (int j = 0; j < 2; ++j) {
    for (int m = 0; m < 2; ++m) {
      direct += std::norm(eff.g[j].dot(W.col(m)) - aux.s(j, m));
      direct += std::norm(eff.g[j].dot(V.col(m)) - aux.t(j, m));
    }
  }
  CHECK(phase_objective(pv, ph) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("penalty_vectors: degenerate inputs") {
  Problem p = synthetic_problem(7, 2, 3, 1, 0);
  p.channels.h_r[0].setZero();
  AuxiliaryVariables aux{CMatrix::Constant(1, 1, cd(0.4, -0.2)), CMatrix(0, 1), CMatrix(0, 0)};
  CMatrix W(2, 1);
  W << cd(1.0, 1.0), cd(-0.5, 0.0);
  PenaltyVectors pv = penalty_vectors(p.channels, W, CMatrix(2, 0), aux);
  CHECK(pv.iu_info[0].d.isZero());
  CHECK(std::abs(pv.iu_info[0].c - (aux.x(0, 0) - p.channels.h_d[0].dot(W.col(0)))) < 1e-15);

  pv = penalty_vectors(synthetic_problem(7, 2, 3, 1, 0).channels, CMatrix::Zero(2, 1), CMatrix(2, 0), aux);
  CHECK(pv.iu_info[0].d.isZero());
  CHECK(pv.iu_info[0].c == aux.x(0, 0));
}

TEST_CASE("update_phase_shifts: single element example") {
  PenaltyVectors pv;
  pv.n = 1;
  pv.iu_rows = 1;
  pv.info_beams = 1;
  pv.iu_info.push_back({CVector::Ones(1), cd(0.0, 1.0)});
  const PhaseShifts out = update_phase_shifts(pv, PhaseShifts::zeros(1), {});
  const cd u = out.unit()(0);
  CHECK(std::abs(u - cd(0.0, 1.0)) < 1e-12);
  CHECK(phase_objective(pv, out) < 1e-24);

  // discrete update stays on the grid and never worsens the objective
  PhaseUpdateParams dp;
  dp.phase_bits = 1;
  const PhaseShifts q = update_phase_shifts(pv, PhaseShifts::zeros(1), dp);
  const CVector uq = q.unit();
  CHECK((std::abs(uq(0) - 1.0) < 1e-12 || std::abs(uq(0) + 1.0) < 1e-12));
  CHECK(phase_objective(pv, q) <= phase_objective(pv, PhaseShifts::zeros(1)) + 1e-15);
}

TEST_CASE("update_phase_shifts: monotone and unit modulus on random instances") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Problem p = synthetic_problem(seed, 3, 6, 2, 2, 10.0, 1.0, 1.0, 1.0);
    const AuxiliaryVariables aux = random_aux(seed + 10, 2, 2, 2);
    const CMatrix W = random_aux(seed + 20, 3, 0, 0).x.leftCols(2);
    const CMatrix V = random_aux(seed + 30, 3, 0, 0).x.rightCols(2);
    const PenaltyVectors pv = penalty_vectors(p.channels, W, V, aux);
    const PhaseShifts start = PhaseShifts::zeros(6);
    for (std::optional<int> bits : {std::optional<int>{}, std::optional<int>{2}}) {
      PhaseUpdateParams params;
      params.phase_bits = bits;
      const PhaseShifts out = update_phase_shifts(pv, start, params);
      CHECK(phase_objective(pv, out) <= phase_objective(pv, start) * (1.0 + 1e-12));
      const CVector u = out.unit();
      for (int n = 0; n < 6; ++n) {
        CHECK(std::abs(std::abs(u(n)) - 1.0) < 1e-12);
        if (bits) {
          const double k = out.theta(n) / (kTwoPi / 4.0);
          CHECK(std::abs(k - std::round(k)) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("update_aux_iu: analytic examples") {
  CVector x1(1);
  x1 << 0.5;
  const CVector r1 = update_aux_iu(x1, 0, 4.0, 1.0, 1e-10);
  CHECK(r1(0).real() == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(std::abs(r1(0).imag()) < 1e-12);
  // lambda from the scale x / x_bar = 1 / (1 - lambda)
  CHECK(1.0 - 0.5 / r1(0).real() == doctest::Approx(0.75).epsilon(1e-8));

  CVector x2(2);
  x2 << 1.0, 1.0;
  const CVector r2 = update_aux_iu(x2, 0, 1.0, 0.5, 1e-10);
  const double lambda = 1.0 - 1.0 / r2(0).real();
  CHECK(lambda == doctest::Approx(0.121).epsilon(2e-3));
  CHECK(r2(0).real() == doctest::Approx(1.138).epsilon(1e-3));
  CHECK(r2(1).real() == doctest::Approx(0.892).epsilon(1e-3));
  CHECK(std::abs(std::norm(r2(0)) - (std::norm(r2(1)) + 0.5)) < 1e-8);
  CHECK(std::abs(g_of_lambda(x2, 0, 1.0, 0.5, lambda)) < 1e-8);

  CVector ok(2);
  ok << 3.0, 0.1;
  CHECK(update_aux_iu(ok, 0, 2.0, 1.0, 1e-7) == ok);

  CVector zero_own(2);
  zero_own << 0.0, cd(0.0, 2.0);
  const CVector r3 = update_aux_iu(zero_own, 0, 3.0, 1.0, 1e-7);
  CHECK(std::abs(r3(1) - cd(0.0, 0.5)) < 1e-14);
  CHECK(r3(0).real() == doctest::Approx(std::sqrt(3.0 * (0.25 + 1.0))));
  CHECK(r3(0).imag() == 0.0);

  CHECK_THROWS_AS(update_aux_iu(x1, 0, 0.0, 1.0, 1e-7), std::invalid_argument);
  CHECK_THROWS_AS(update_aux_iu(x1, 0, 1.0, -1.0, 1e-7), std::invalid_argument);
}

TEST_CASE("update_aux_iu: G increasing and output feasible on random rows") {
  Rng rng(11, StreamTag::AuxInit, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + trial % 4;
    CVector x(k);
    for (int a = 0; a < k; ++a) x(a) = rng.complex_normal();
    const int i = trial % k;
    const double gamma = 0.5 + (trial % 7);
    const double sigma2 = 0.1 + 0.3 * (trial % 5);
    double prev = g_of_lambda(x, i, gamma, sigma2, 0.0);
    for (double l = 0.05; l < 0.999; l += 0.05) {
      const double g = g_of_lambda(x, i, gamma, sigma2, l);
      CHECK(g > prev);
      prev = g;
    }
    const CVector out = update_aux_iu(x, i, gamma, sigma2, 1e-7);
    CHECK(sinr_row_ok(out, i, gamma, sigma2, 1e-12));
    // the correction keeps each entry's phase
    for (int a = 0; a < k; ++a) {
      if (std::abs(x(a)) > 0.0) CHECK(std::abs(std::arg(out(a) / x(a))) < 1e-9);
    }
  }
}

TEST_CASE("update_aux_eu: closed form matches dual bisection") {
  CVector s(2), t(2);
  s << 1.0, 0.0;
  t << 1.0, cd(0.0, 1.0);
  auto [so, to] = update_aux_eu(s, t, 12.0, 0);
  CHECK(std::abs(so(0) - 2.0) < 1e-14);
  CHECK(std::abs(so(1)) < 1e-14);
  CHECK(std::abs(to(0) - 2.0) < 1e-14);
  CHECK(std::abs(to(1) - cd(0.0, 2.0)) < 1e-14);
  auto [sb, tb] = dual_bisection_eu(s, t, 12.0);
  CHECK((sb - so).norm() < 1e-9);
  CHECK((tb - to).norm() < 1e-9);

  auto [se, te] = update_aux_eu(s, t, 3.0, 0);
  CHECK(se == s);
  CHECK(te == t);

  auto [sz, tz] = update_aux_eu(CVector::Zero(2), CVector::Zero(2), 4.0, 1);
  CHECK(tz(1) == cd(2.0, 0.0));
  CHECK(tz(0) == cd(0.0, 0.0));
  CHECK(sz.isZero());
  auto [sn, tn] = update_aux_eu(CVector::Zero(2), CVector(0), 4.0, 0);
  CHECK(sn(0) == cd(2.0, 0.0));
  CHECK(tn.size() == 0);
  CHECK_THROWS_AS(update_aux_eu(s, t, 0.0, 0), std::invalid_argument);

  Rng rng(12, StreamTag::AuxInit, 2);
  for (int trial = 0; trial < 100; ++trial) {
    CVector a(2), b(3);
    for (int q = 0; q < 2; ++q) a(q) = rng.complex_normal();
    for (int q = 0; q < 3; ++q) b(q) = rng.complex_normal();
    const double e = 0.2 + 0.1 * trial;
    auto [ao, bo] = update_aux_eu(a, b, e, 0);
    const double pin = a.squaredNorm() + b.squaredNorm();
    CHECK(ao.squaredNorm() + bo.squaredNorm() == doctest::Approx(std::max(e, pin)).epsilon(1e-13));
    auto [ar, br] = dual_bisection_eu(a, b, e);
    CHECK((ar - ao).norm() + (br - bo).norm() < 1e-8 * std::sqrt(e));
  }
}

TEST_CASE("inner_bcd: trace non-increasing after a feasible start") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Problem p = normalized(synthetic_problem(seed, 3, 4, 2, 2));
    SolverParams params;
    params.seed = seed;
    params.rho0 = 5.0;
    SolverState st = init_state(p, params);
    inner_bcd(st, p, params);  // first pass reaches feasible aux
    const std::size_t start = st.history.objective.size();
    st.rho *= params.c;
    inner_bcd(st, p, params);
    const auto& obj = st.history.objective;
    for (std::size_t k = start + 1; k < obj.size(); ++k) {
      CHECK(obj[k] <= obj[k - 1] * (1.0 + 1e-14));
    }
    // a second run from the fixed point barely moves the objective
    SolverParams one = params;
    one.max_inner = 1;
    const double before = st.penalized_objective;
    inner_bcd(st, p, one);
    CHECK(st.penalized_objective <= before * (1.0 + 1e-14));
  }
}

TEST_CASE("inner_bcd: huge rho drives precoders to zero") {
  const Problem p = normalized(synthetic_problem(1, 3, 2, 1, 1));
  SolverParams params;
  params.rho0 = 1e6;
  SolverState st = init_state(p, params);
  inner_bcd(st, p, params);
  CHECK(st.sol.W.norm() < 1e-3);
  CHECK(st.sol.V.norm() < 1e-3);
  CHECK(sinr_row_ok(st.aux.x.row(0).transpose(), 0, p.targets.gamma(0), p.noise.sigma2(0), 1e-6));
}

TEST_CASE("solve: converged run is feasible with xi below eps2") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Problem p = synthetic_problem(seed, 4, 4, 2, 2);
    SolverParams params;
    params.seed = seed;
    const SolveReport rep = solve(p, params);
    REQUIRE(rep.converged);
    CHECK(rep.xi_final <= params.eps2);
    CHECK(rep.feasibility.feasible);
    CHECK(rep.feasibility.min_margin() >= 1.0 - 1e-3);
    CHECK(rep.power == doctest::Approx(transmit_power(rep.sol)));
    for (std::size_t k = 1; k < rep.traces.rho.size(); ++k) CHECK(rep.traces.rho[k] < rep.traces.rho[k - 1]);
  }
}

TEST_CASE("solve: N = 0 equals zero reflected links") {
  const Problem ref = synthetic_problem(5, 3, 0, 2, 1);
  Problem zeroed = synthetic_problem(5, 3, 4, 2, 1);
  zeroed.channels.h_d = ref.channels.h_d;
  zeroed.channels.g_d = ref.channels.g_d;
  for (auto& v : zeroed.channels.h_r) v.setZero();
  for (auto& v : zeroed.channels.g_r) v.setZero();
  SolverParams params;
  // both runs must see the same scaled problem
  params.reference_gain = params.reference_gain_fixed_channels;
  const SolveReport a = solve(ref, params);
  const SolveReport b = solve(zeroed, params);
  CHECK(b.power == doctest::Approx(a.power).epsilon(1e-9));
}

TEST_CASE("solve: power scales inversely with channel gain") {
  const Problem p = synthetic_problem(6, 3, 4, 2, 2);
  Problem q = p;
  const double c = 1e-3;
  q.channels.F *= c;
  for (auto* group : {&q.channels.h_d, &q.channels.g_d}) {
    for (auto& v : *group) v *= c * c;
  }
  for (auto* group : {&q.channels.h_r, &q.channels.g_r}) {
    for (auto& v : *group) v *= c;
  }
  const SolveReport a = solve(p, {});
  const SolveReport b = solve(q, {});
  CHECK(b.power * c * c * c * c == doctest::Approx(a.power).epsilon(1e-6));
}

TEST_CASE("solve: discrete phases stay on the grid") {
  const Problem p = synthetic_problem(8, 3, 4, 1, 1);
  SolverParams params;
  params.phase_bits = 2;
  const SolveReport rep = solve(p, params);
  for (int n = 0; n < 4; ++n) {
    const double k = rep.sol.phases.theta(n) / (kTwoPi / 4.0);
    CHECK(std::abs(k - std::round(k)) < 1e-9);
  }
  CHECK(rep.feasibility.feasible);
}

TEST_CASE("solve: fixed information beams are kept") {
  Problem p = synthetic_problem(9, 4, 3, 1, 1);
  const SolveReport free_run = solve(p, {});
  p.structure.fixed_information_beams = free_run.sol.W;
  const SolveReport rep = solve(p, {});
  CHECK(rep.sol.W == free_run.sol.W);
  CHECK(rep.feasibility.energy_margin(0) >= 1.0 - 1e-3);
}

TEST_CASE("parameter and problem validation") {
  SolverParams bad;
  bad.c = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = {};
  bad.rho0 = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = {};
  bad.max_outer = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = {};
  bad.eps3 = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = {};
  bad.phase_bits = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  Problem p = synthetic_problem(1, 3, 2, 2, 1);
  p.targets.gamma(0) = -1.0;
  CHECK_THROWS(solve(p, {}));
  p = synthetic_problem(1, 3, 2, 2, 1);
  p.noise.sigma2 = RVector::Ones(1);
  CHECK_THROWS(solve(p, {}));
}
