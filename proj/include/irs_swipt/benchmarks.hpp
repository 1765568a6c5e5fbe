#pragma once

#include "irs_swipt/penalty_solver.hpp"

namespace irs_swipt {

/// Reflected links removed, precoders optimized on the direct channels.
SolveReport solve_no_irs(const Problem& problem, const SolverParams& params);

/// All phases held at zero, precoders optimized on the resulting channels.
SolveReport solve_fixed_phase(const Problem& problem, const SolverParams& params);

struct AlternatingParams {
  int max_rounds = 30;
  int phase_levels = 16;  // candidate grid when phases are continuous
  int max_phase_sweeps = 10;
};

/// Alternates a precoder-only solve with an element-wise phase search that
/// maximizes the minimum QoS margin at fixed precoders. A round whose precoder
/// solve fails or raises the power keeps the previous solution.
SolveReport solve_alternating(const Problem& problem, const SolverParams& params,
                              const AlternatingParams& alt = {});

/// Minimum over users of SINR_i / gamma_i and Q_j / E_j.
double min_qos_margin(const BeamformingSolution& sol, const ChannelSet& cs, const QosTargets& targets,
                      const NoisePowers& noise);

/// Information beams designed on the direct IU channels alone, then energy
/// beams confined to the nullspace of those channels and optimized jointly
/// with the phases for the EUs. Requires K_I < M.
SolveReport solve_separate_beams(const Problem& problem, const SolverParams& params);

/// Orthonormal basis of the nullspace of the stacked rows h_d,i^H (M x (M - K_I)).
CMatrix direct_nullspace(const ChannelSet& cs);

/// Number of energy beams: eigenvalues of V V^H above rel_threshold times its
/// trace. Invariant to unitary recombination of the columns of V.
int count_energy_beams(const CMatrix& V, double rel_threshold = 1e-3);

}  // namespace irs_swipt
