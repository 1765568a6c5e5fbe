#pragma once

#include "irs_swipt/swipt_metrics.hpp"
#include "irs_swipt/unit_modulus.hpp"

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace irs_swipt {

// Two-layer penalty method: block coordinate descent over precoders, phase
// shifts and decoupling auxiliaries at fixed rho (inner), geometric decrease
// of rho until the equality residual xi drops below eps2 (outer).

struct SolverParams {
  double rho0 = 1000.0;
  double c = 0.9;
  double eps1 = 1e-4;
  double eps2 = 1e-7;
  double eps3 = 1e-7;
  int max_inner = 100;
  int max_outer = 300;
  int max_phase_sweeps = 50;
  std::optional<int> phase_bits;  // absent: continuous phases
  std::uint64_t seed = 0;         // auxiliary initialization stream
  double feasibility_tol = 1e-3;  // tolerance of SolveReport::feasibility
  bool check_monotone = true;
  // Mean channel gain of the scaled problem the iterations run on (see
  // normalized()). Sets the initial penalty weight gain / (2 rho0) relative to
  // the transmit power term; 0 keeps noise/target normalization only.
  double reference_gain = 1000.0;               // with IRS elements
  double reference_gain_fixed_channels = 1e5;   // N = 0

  void validate() const;
};

/// Optional structural restrictions on the precoders.
struct PrecoderStructure {
  // Information precoders held fixed (M x K_I); the SINR constraints then
  // leave the problem and only the energy side is optimized.
  std::optional<CMatrix> fixed_information_beams;
  // Energy beams restricted to span(B), B an M x M' orthonormal basis.
  std::optional<CMatrix> energy_subspace;
};

struct Problem {
  ChannelSet channels;
  QosTargets targets;
  NoisePowers noise;
  bool energy_beams_enabled = true;
  PrecoderStructure structure;

  int K_I() const { return channels.K_I(); }
  int K_E() const { return channels.K_E(); }
  int num_energy_beams() const { return energy_beams_enabled ? K_E() : 0; }
  bool optimizes_information_beams() const { return !structure.fixed_information_beams; }
  void validate() const;
};

/// Received power every user must reach in the normalized problem.
inline constexpr double kNormalizedRequiredLevel = 10.0;

/// Equivalent problem in which every user needs received power
/// kNormalizedRequiredLevel: IU i gets noise level / gamma_i and EU targets
/// become level, by scaling the user's channels. A positive `reference_gain`
/// further scales all channels by s so that the mean squared norm of the
/// effective channels at zero phase equals it; the precoders of the scaled
/// problem are then W / s.
Problem normalized(const Problem& problem, double reference_gain = 0.0, double* precoder_scale = nullptr);

struct SolverTrace {
  std::vector<double> objective;  // penalized objective after every inner iteration
  std::vector<double> xi;         // after every outer iteration
  std::vector<double> power;      // after every outer iteration
  std::vector<double> rho;        // value used in each outer iteration
  std::vector<int> inner_iters;   // per outer iteration
};

struct SolverState {
  BeamformingSolution sol;
  AuxiliaryVariables aux;
  double rho = 0.0;
  double penalized_objective = 0.0;
  SolverTrace history;
};

struct SolveReport {
  BeamformingSolution sol;
  double power = 0.0;
  double xi_final = 0.0;
  FeasibilityReport feasibility;
  int outer_iters = 0;
  int inner_iters_total = 0;
  bool converged = false;
  SolverTrace traces;
};

class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

SolverState init_state(const Problem& problem, const SolverParams& params);

/// Closed-form minimizers of the precoder block for fixed aux and channels.
std::pair<CMatrix, CMatrix> update_precoders(const EffectiveChannels& eff,
                                             const AuxiliaryVariables& aux, double rho);

/// Objective of the precoder block (transmit power plus scaled penalties).
double precoder_block_objective(const EffectiveChannels& eff, const AuxiliaryVariables& aux,
                                const CMatrix& W, const CMatrix& V, double rho);

/// Residual pieces linear in the phasors: for the current precoders and aux,
/// h_i^H w_k - x_{i,k} = sum_n exp(j theta_n) d_n - c, and likewise for the
/// EU/information and EU/energy products.
struct PenaltyVectors {
  int n = 0;
  int iu_rows = 0;       // rows of x (0 when information beams are fixed)
  int info_beams = 0;    // columns of W
  int eu_rows = 0;
  int energy_beams = 0;  // columns of V
  std::vector<PhaseTerm> iu_info;    // (i, k) at i * info_beams + k
  std::vector<PhaseTerm> eu_info;    // (j, i) at j * info_beams + i
  std::vector<PhaseTerm> eu_energy;  // (j, m) at j * energy_beams + m
};

PenaltyVectors penalty_vectors(const ChannelSet& cs, const CMatrix& W, const CMatrix& V,
                               const AuxiliaryVariables& aux);

/// Phase-block objective, constant terms included.
double phase_objective(const PenaltyVectors& pv, const PhaseShifts& phases);

struct PhaseUpdateParams {
  double eps1 = 1e-4;
  int max_sweeps = 50;
  std::optional<int> phase_bits;
};

PhaseShifts update_phase_shifts(const PenaltyVectors& pv, const PhaseShifts& current,
                                const PhaseUpdateParams& params);

/// SINR-constrained projection of one aux row (x_{i,k} for all k).
CVector update_aux_iu(const CVector& x_bar, int i, double gamma, double sigma2, double eps3);

/// Energy-constrained projection of one EU row; returns (s row, t row).
std::pair<CVector, CVector> update_aux_eu(const CVector& s_bar, const CVector& t_bar,
                                          double e_min, int j);

double penalized_objective(const Problem& problem, const BeamformingSolution& sol,
                           const AuxiliaryVariables& aux, double rho);

/// Runs block coordinate descent at the state's rho; returns inner iterations.
int inner_bcd(SolverState& state, const Problem& problem, const SolverParams& params);

SolveReport solve(const Problem& problem, const SolverParams& params);

}  // namespace irs_swipt
