#include "irs_swipt/parallel_solver.hpp"

#include <exception>
#include <thread>

namespace irs_swipt {

Association associate_users(const Scenario& scenario) {
  const auto L = static_cast<int>(scenario.irs_list.size());
  if (L < 1) throw std::invalid_argument("associate_users: no IRS");
  Association assoc;
  assoc.members.resize(L);
  auto nearest = [&](Vec3 p) {
    int best = 0;
    double best_d = distance(p, scenario.irs_list[0].reference_position);
    for (int l = 1; l < L; ++l) {
      const double d = distance(p, scenario.irs_list[l].reference_position);
      if (d < best_d) {
        best = l;
        best_d = d;
      }
    }
    return best;
  };
  for (std::size_t i = 0; i < scenario.iu_list.size(); ++i) {
    const int l = nearest(scenario.iu_list[i]);
    assoc.iu_irs.push_back(l);
    assoc.members[l].push_back({UserKind::Iu, static_cast<int>(i)});
  }
  for (std::size_t j = 0; j < scenario.eu_list.size(); ++j) {
    const int l = nearest(scenario.eu_list[j]);
    assoc.eu_irs.push_back(l);
    assoc.members[l].push_back({UserKind::Eu, static_cast<int>(j)});
  }
  return assoc;
}

namespace {

const CVector& direct_of(const ChannelSet& cs, UserRef u) {
  return u.kind == UserKind::Iu ? cs.h_d.at(u.index) : cs.g_d.at(u.index);
}

const CVector& reflected_of(const ChannelSet& cs, UserRef u) {
  return u.kind == UserKind::Iu ? cs.h_r.at(u.index) : cs.g_r.at(u.index);
}

const IndexRange& range_of(const ChannelSet& cs, int irs) {
  if (irs < 0 || irs >= static_cast<int>(cs.irs_offsets.size())) {
    throw std::out_of_range("IRS index out of range");
  }
  return cs.irs_offsets[irs];
}

}  // namespace

double irs_sum_gain(const ChannelSet& cs, const std::vector<UserRef>& users, int irs,
                    const RVector& theta_irs) {
  const IndexRange& r = range_of(cs, irs);
  if (theta_irs.size() != r.size) throw std::invalid_argument("irs_sum_gain: phase length mismatch");
  const CMatrix Fl = cs.F.middleRows(r.offset, r.size);
  double total = 0.0;
  for (const UserRef& u : users) {
    const CVector qr = reflected_of(cs, u).segment(r.offset, r.size);
    CVector row = direct_of(cs, u).conjugate();
    for (int n = 0; n < r.size; ++n) {
      row += std::conj(qr(n)) * std::polar(1.0, theta_irs(n)) * Fl.row(n).transpose();
    }
    total += row.squaredNorm();
  }
  return total;
}

RVector optimize_irs_phases(const ChannelSet& cs, const Association& assoc, int irs,
                            const IrsPhaseParams& params) {
  const IndexRange& r = range_of(cs, irs);
  if (irs >= assoc.num_irs()) throw std::out_of_range("optimize_irs_phases: IRS not in association");
  const auto& users = assoc.members[irs];
  if (users.empty() || r.size == 0) return RVector::Zero(r.size);

  // ||v^T Phi_k + q_d^H||^2 = sum_m |v^T d_m - c_m|^2 with
  // d_m = conj(q_r) .* F(:, m) and c_m = -conj(q_d(m))
  const CMatrix Fl = cs.F.middleRows(r.offset, r.size);
  std::vector<PhaseTerm> terms;
  for (const UserRef& u : users) {
    const CVector qr = reflected_of(cs, u).segment(r.offset, r.size).conjugate();
    const CVector& qd = direct_of(cs, u);
    for (Eigen::Index m = 0; m < Fl.cols(); ++m) {
      terms.push_back({qr.cwiseProduct(Fl.col(m)), -std::conj(qd(m))});
    }
  }
  const PhaseQuadratic form(r.size, {&terms});
  const CVector v = form.coordinate_sweeps(CVector::Ones(r.size), true, params.tol, params.max_sweeps,
                                           params.phase_bits);
  return PhaseShifts::from_unit(v).theta;
}

SolveReport solve_low_complexity(const Problem& problem, const Association& assoc,
                                 const SolverParams& params, const LowComplexityOptions& options) {
  problem.validate();
  const ChannelSet& cs = problem.channels;
  const auto L = static_cast<int>(cs.irs_offsets.size());
  if (assoc.num_irs() != L) throw std::invalid_argument("solve_low_complexity: association/IRS count mismatch");
  if (static_cast<int>(assoc.iu_irs.size()) != problem.K_I() ||
      static_cast<int>(assoc.eu_irs.size()) != problem.K_E()) {
    throw std::invalid_argument("solve_low_complexity: association/user count mismatch");
  }

  const IrsPhaseParams phase_params{params.eps1, options.max_sweeps, params.phase_bits};
  std::vector<RVector> per_irs(L);
  if (options.parallel && L > 1) {
    std::vector<std::exception_ptr> errors(L);
    {
      std::vector<std::jthread> workers;
      for (int l = 0; l < L; ++l) {
        workers.emplace_back([&, l] {
          try {
            per_irs[l] = optimize_irs_phases(cs, assoc, l, phase_params);
          } catch (...) {
            errors[l] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  } else {
    for (int l = 0; l < L; ++l) per_irs[l] = optimize_irs_phases(cs, assoc, l, phase_params);
  }

  PhaseShifts phases = PhaseShifts::zeros(cs.N());
  for (int l = 0; l < L; ++l) phases.theta.segment(cs.irs_offsets[l].offset, cs.irs_offsets[l].size) = per_irs[l];

  Problem frozen = problem;
  frozen.channels = freeze_phases(cs, phases);
  SolveReport rep = solve(frozen, params);
  rep.sol.phases = phases;
  rep.feasibility = qos_feasibility(rep.sol, cs, problem.targets, problem.noise, params.feasibility_tol);
  return rep;
}

}  // namespace irs_swipt
