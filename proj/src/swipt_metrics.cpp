#include "irs_swipt/swipt_metrics.hpp"

#include <algorithm>
#include <limits>

namespace irs_swipt {

void QosTargets::validate() const {
  for (Eigen::Index i = 0; i < gamma.size(); ++i) {
    if (!(gamma(i) > 0.0)) throw std::invalid_argument("QosTargets: gamma must be > 0");
  }
  for (Eigen::Index j = 0; j < e_min.size(); ++j) {
    if (!(e_min(j) > 0.0)) throw std::invalid_argument("QosTargets: e_min must be > 0");
  }
}

double FeasibilityReport::min_margin() const {
  double m = std::numeric_limits<double>::infinity();
  if (sinr_margin.size() > 0) m = std::min(m, sinr_margin.minCoeff());
  if (energy_margin.size() > 0) m = std::min(m, energy_margin.minCoeff());
  return m;
}

namespace {

double sinr_from(const CVector& h, const CMatrix& W, double sigma2, int i) {
  double signal = 0.0;
  double interference = 0.0;
  for (Eigen::Index k = 0; k < W.cols(); ++k) {
    const double p = std::norm(h.dot(W.col(k)));
    if (k == i) {
      signal = p;
    } else {
      interference += p;
    }
  }
  return signal / (interference + sigma2);
}

double harvested_from(const CVector& g, const CMatrix& W, const CMatrix& V) {
  double q = 0.0;
  for (Eigen::Index i = 0; i < W.cols(); ++i) q += std::norm(g.dot(W.col(i)));
  for (Eigen::Index m = 0; m < V.cols(); ++m) q += std::norm(g.dot(V.col(m)));
  return q;
}

}  // namespace

double sinr(const BeamformingSolution& sol, const ChannelSet& cs, const NoisePowers& noise, int i) {
  const CVector h = effective_channel(cs, sol.phases, UserKind::Iu, i);
  return sinr_from(h, sol.W, noise.sigma2(i), i);
}

double harvested_power(const BeamformingSolution& sol, const ChannelSet& cs, int j) {
  const CVector g = effective_channel(cs, sol.phases, UserKind::Eu, j);
  return harvested_from(g, sol.W, sol.V);
}

double transmit_power(const BeamformingSolution& sol) {
  return sol.W.squaredNorm() + sol.V.squaredNorm();
}

FeasibilityReport qos_feasibility(const BeamformingSolution& sol, const ChannelSet& cs,
                                  const QosTargets& targets, const NoisePowers& noise, double tol) {
  if (tol < 0.0) throw std::invalid_argument("qos_feasibility: tol must be >= 0");
  const EffectiveChannels eff = effective_channels(cs, sol.phases);
  FeasibilityReport rep;
  rep.sinr_margin.resize(cs.K_I());
  rep.energy_margin.resize(cs.K_E());
  for (int i = 0; i < cs.K_I(); ++i) {
    rep.sinr_margin(i) = sinr_from(eff.h[i], sol.W, noise.sigma2(i), i) / targets.gamma(i);
  }
  for (int j = 0; j < cs.K_E(); ++j) {
    rep.energy_margin(j) = harvested_from(eff.g[j], sol.W, sol.V) / targets.e_min(j);
  }
  rep.feasible = rep.min_margin() >= 1.0 - tol;
  return rep;
}

double constraint_violation(const EffectiveChannels& eff, const CMatrix& W, const CMatrix& V,
                            const AuxiliaryVariables& aux) {
  double xi = 0.0;
  for (Eigen::Index i = 0; i < aux.x.rows(); ++i) {
    for (Eigen::Index k = 0; k < aux.x.cols(); ++k) {
      xi = std::max(xi, std::norm(eff.h[i].dot(W.col(k)) - aux.x(i, k)));
    }
  }
  for (Eigen::Index j = 0; j < aux.s.rows(); ++j) {
    for (Eigen::Index i = 0; i < aux.s.cols(); ++i) {
      xi = std::max(xi, std::norm(eff.g[j].dot(W.col(i)) - aux.s(j, i)));
    }
    for (Eigen::Index m = 0; m < aux.t.cols(); ++m) {
      xi = std::max(xi, std::norm(eff.g[j].dot(V.col(m)) - aux.t(j, m)));
    }
  }
  return xi;
}

double constraint_violation(const BeamformingSolution& sol, const ChannelSet& cs,
                            const AuxiliaryVariables& aux) {
  return constraint_violation(effective_channels(cs, sol.phases), sol.W, sol.V, aux);
}

AuxiliaryVariables exact_auxiliaries(const EffectiveChannels& eff, const CMatrix& W, const CMatrix& V) {
  const auto ki = static_cast<Eigen::Index>(eff.h.size());
  const auto ke = static_cast<Eigen::Index>(eff.g.size());
  AuxiliaryVariables aux{CMatrix(ki, W.cols()), CMatrix(ke, W.cols()), CMatrix(ke, V.cols())};
  for (Eigen::Index i = 0; i < ki; ++i) {
    for (Eigen::Index k = 0; k < W.cols(); ++k) aux.x(i, k) = eff.h[i].dot(W.col(k));
  }
  for (Eigen::Index j = 0; j < ke; ++j) {
    for (Eigen::Index i = 0; i < W.cols(); ++i) aux.s(j, i) = eff.g[j].dot(W.col(i));
    for (Eigen::Index m = 0; m < V.cols(); ++m) aux.t(j, m) = eff.g[j].dot(V.col(m));
  }
  return aux;
}

}  // namespace irs_swipt
