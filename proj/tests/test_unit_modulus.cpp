#include "irs_swipt/unit_modulus.hpp"
#include "irs_swipt/rng.hpp"

#include <doctest.h>

using namespace irs_swipt;

namespace {

std::vector<PhaseTerm> random_terms(std::uint64_t seed, int n, int count) {
  Rng rng(seed, StreamTag::AuxInit, 77);
  std::vector<PhaseTerm> out;
  for (int t = 0; t < count; ++t) {
    CVector d(n);
    for (int k = 0; k < n; ++k) d(k) = rng.complex_normal();
    out.push_back({d, 2.0 * rng.complex_normal()});
  }
  return out;
}

double direct_value(const std::vector<PhaseTerm>& terms, const CVector& v) {
  double f = 0.0;
  for (const auto& t : terms) f += std::norm((v.transpose() * t.d)(0) - t.c);
  return f;
}

}  // namespace

TEST_CASE("quadratic form matches direct evaluation") {
  const auto terms = random_terms(1, 5, 7);
  const PhaseQuadratic q(5, {&terms});
  CVector v(5);
  for (int k = 0; k < 5; ++k) v(k) = std::polar(1.0, 0.7 * k);
  CHECK(q.value(v) == doctest::Approx(direct_value(terms, v)).epsilon(1e-12));
}

TEST_CASE("each coordinate update is the exact coordinate minimizer (fine grid oracle)") {
  const auto terms = random_terms(2, 2, 4);
  const PhaseQuadratic q(2, {&terms});
  CVector v = CVector::Ones(2);
  // one coordinate at a time from v: compare against a 4096-point grid
  for (int k = 0; k < 2; ++k) {
    const CVector after = q.coordinate_sweeps(v, false, 0.0, 1);
    // the first coordinate of the single sweep is optimal given v(1)
    if (k == 0) {
      double best = 1e300;
      for (int g = 0; g < 4096; ++g) {
        CVector w = v;
        w(0) = std::polar(1.0, kTwoPi * g / 4096);
        best = std::min(best, direct_value(terms, w));
      }
      CVector w = v;
      w(0) = after(0);
      CHECK(direct_value(terms, w) <= best + 1e-9);
    } else {
      double best = 1e300;
      for (int g = 0; g < 4096; ++g) {
        CVector w = after;
        w(1) = std::polar(1.0, kTwoPi * g / 4096);
        best = std::min(best, direct_value(terms, w));
      }
      CHECK(direct_value(terms, after) <= best + 1e-9);
    }
  }
}

TEST_CASE("sweeps never increase the objective and keep unit modulus") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto terms = random_terms(seed, 6, 9);
    const PhaseQuadratic q(6, {&terms});
    CVector v = CVector::Ones(6);
    double prev = q.value(v);
    for (int s = 0; s < 5; ++s) {
      v = q.coordinate_sweeps(v, false, 0.0, 1);
      const double cur = q.value(v);
      CHECK(cur <= prev + 1e-12 * std::abs(prev));
      prev = cur;
    }
    for (int k = 0; k < 6; ++k) CHECK(std::abs(v(k)) == doctest::Approx(1.0).epsilon(1e-14));
    const CVector up = q.coordinate_sweeps(CVector::Ones(6), true, 0.0, 5);
    CHECK(q.value(up) >= q.value(CVector::Ones(6)) - 1e-12);
  }
}

TEST_CASE("minimizer of a single residual aligns to cancel it") {
  // f(v) = |v d - c|^2 with d = 1, c = j: minimized at v = j (phasor)
  std::vector<PhaseTerm> terms{{CVector::Ones(1), cd(0.0, 1.0)}};
  const PhaseQuadratic q(1, {&terms});
  const CVector v = q.coordinate_sweeps(CVector::Ones(1), false, 1e-12, 10);
  CHECK(v(0).real() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(v(0).imag() == doctest::Approx(1.0));
  CHECK(q.value(v) == doctest::Approx(0.0));
}

TEST_CASE("zero coupling picks phase zero") {
  std::vector<PhaseTerm> terms{{CVector::Zero(1), cd(1.0, 0.0)}};
  const PhaseQuadratic q(1, {&terms});
  CVector start(1);
  start << cd(0.0, 1.0);
  const CVector v = q.coordinate_sweeps(start, false, 0.0, 1);
  CHECK(v(0) == cd(1.0, 0.0));
}

TEST_CASE("discrete projection picks the nearest level, ties to the smaller index") {
  CHECK(std::abs(project_discrete(std::polar(1.0, 0.1), 2) - cd(1.0, 0.0)) < 1e-12);
  CHECK(std::abs(project_discrete(std::polar(1.0, 1.2), 2) - cd(0.0, 1.0)) < 1e-12);
  CHECK(std::abs(project_discrete(std::polar(1.0, kPi / 4), 2) - cd(1.0, 0.0)) < 1e-12);
  CHECK(std::abs(project_discrete(std::polar(1.0, 3 * kPi / 4), 2) - cd(0.0, 1.0)) < 1e-12);
  // tie between the last level and k = 0 wraps to k = 0
  CHECK(std::abs(project_discrete(std::polar(1.0, 7 * kPi / 4), 2) - cd(1.0, 0.0)) < 1e-12);
  CHECK(std::abs(project_discrete(cd(-1.0, 0.0), 1) - cd(-1.0, 0.0)) < 1e-12);
  CHECK_THROWS_AS(project_discrete(cd(1.0, 0.0), 0), std::invalid_argument);
}

TEST_CASE("discrete sweeps stay on the grid and do not increase the objective") {
  const auto terms = random_terms(5, 5, 8);
  const PhaseQuadratic q(5, {&terms});
  const CVector start = CVector::Ones(5);
  const CVector v = q.coordinate_sweeps(start, false, 0.0, 10, 2);
  CHECK(q.value(v) <= q.value(start) + 1e-12);
  for (int k = 0; k < 5; ++k) {
    const double a = std::arg(v(k)) / (kPi / 2);
    CHECK(std::abs(a - std::round(a)) < 1e-12);
  }
}
