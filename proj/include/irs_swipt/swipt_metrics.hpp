#pragma once

#include "irs_swipt/channel_model.hpp"

namespace irs_swipt {

struct BeamformingSolution {
  CMatrix W;  // M x K_I information precoders
  CMatrix V;  // M x K_E energy precoders, zero columns when energy beams are off
  PhaseShifts phases;
};

struct QosTargets {
  RVector gamma;  // linear SINR targets
  RVector e_min;  // watts

  void validate() const;
};

struct AuxiliaryVariables {
  CMatrix x;  // K_I x K_I, x(i,k) ~ h_i^H w_k
  CMatrix s;  // K_E x K_I, s(j,i) ~ g_j^H w_i
  CMatrix t;  // K_E x K_E, t(j,m) ~ g_j^H v_m
};

struct FeasibilityReport {
  RVector sinr_margin;    // SINR_i / gamma_i
  RVector energy_margin;  // Q_j / E_j
  bool feasible = false;

  double min_margin() const;
};

inline constexpr double kDefaultFeasibilityTol = 1e-6;

double sinr(const BeamformingSolution& sol, const ChannelSet& cs, const NoisePowers& noise, int i);
double harvested_power(const BeamformingSolution& sol, const ChannelSet& cs, int j);
double transmit_power(const BeamformingSolution& sol);

FeasibilityReport qos_feasibility(const BeamformingSolution& sol, const ChannelSet& cs,
                                  const QosTargets& targets, const NoisePowers& noise,
                                  double tol = kDefaultFeasibilityTol);

/// Max squared residual of the bilinear equalities tying aux to the precoders.
double constraint_violation(const BeamformingSolution& sol, const ChannelSet& cs,
                            const AuxiliaryVariables& aux);

/// Same indicator evaluated on precomputed effective channels.
double constraint_violation(const EffectiveChannels& eff, const CMatrix& W, const CMatrix& V,
                            const AuxiliaryVariables& aux);

/// Exact bilinear products for the current precoders (the aux point with xi = 0).
AuxiliaryVariables exact_auxiliaries(const EffectiveChannels& eff, const CMatrix& W, const CMatrix& V);

}  // namespace irs_swipt
