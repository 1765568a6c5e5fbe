#include "irs_swipt/channel_model.hpp"

#include "irs_swipt/rng.hpp"

#include <cmath>

namespace irs_swipt {

std::vector<Vec3> IrsSpec::element_positions() const {
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (int iz = 0; iz < n_z; ++iz) {
    for (int iy = 0; iy < n_y; ++iy) {
      out.push_back(reference_position +
                    Vec3{0.0, iy * element_spacing, iz * element_spacing});
    }
  }
  return out;
}

void IrsSpec::validate() const {
  if (n_y < 1 || n_z < 1) {
    throw std::invalid_argument("IrsSpec: n_y and n_z must be >= 1");
  }
  if (!(element_spacing > 0.0)) {
    throw std::invalid_argument("IrsSpec: element_spacing must be > 0");
  }
}

int Scenario::total_elements() const {
  int n = 0;
  for (const auto& irs : irs_list) n += irs.size();
  return n;
}

double Scenario::resolved_wavelength() const {
  if (wavelength) return *wavelength;
  if (!irs_list.empty()) return 2.0 * irs_list.front().element_spacing;
  return wavelength_from_carrier(carrier_freq);
}

double Scenario::noise_power_w() const {
  return db_to_linear(noise_psd_dbm_hz) * 1e-3 * bandwidth;
}

void Scenario::validate() const {
  if (ap_antennas < 1) throw std::invalid_argument("Scenario: ap_antennas must be >= 1");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("Scenario: bandwidth must be > 0");
  if (!(carrier_freq > 0.0)) throw std::invalid_argument("Scenario: carrier_freq must be > 0");
  if (!(alpha_ap_user > 0.0) || !(alpha_ap_irs > 0.0) || !(alpha_irs_user > 0.0)) {
    throw std::invalid_argument("Scenario: path-loss exponents must be > 0");
  }
  if (wavelength && !(*wavelength > 0.0)) {
    throw std::invalid_argument("Scenario: wavelength must be > 0");
  }
  if (irs_gain_applications < 1 || irs_gain_applications > 2) {
    throw std::invalid_argument("Scenario: irs_gain_applications must be 1 or 2");
  }
  for (const auto& irs : irs_list) {
    irs.validate();
    if (!(distance(ap_position, irs.reference_position) > 0.0)) {
      throw std::invalid_argument("Scenario: AP collocated with an IRS");
    }
  }
  auto check_user = [&](const Vec3& p) {
    if (!(distance(ap_position, p) > 0.0)) {
      throw std::invalid_argument("Scenario: user collocated with the AP");
    }
    for (const auto& irs : irs_list) {
      for (const auto& e : irs.element_positions()) {
        if (!(distance(e, p) > 0.0)) {
          throw std::invalid_argument("Scenario: user collocated with an IRS element");
        }
      }
    }
  };
  for (const auto& p : iu_list) check_user(p);
  for (const auto& p : eu_list) check_user(p);
}

void ChannelSet::validate() const {
  const int m = M();
  const int n = N();
  for (const auto& v : h_d) {
    if (v.size() != m) throw std::invalid_argument("ChannelSet: h_d length != M");
  }
  for (const auto& v : g_d) {
    if (v.size() != m) throw std::invalid_argument("ChannelSet: g_d length != M");
  }
  if (h_r.size() != h_d.size() || g_r.size() != g_d.size()) {
    throw std::invalid_argument("ChannelSet: reflected and direct user counts differ");
  }
  for (const auto& v : h_r) {
    if (v.size() != n) throw std::invalid_argument("ChannelSet: h_r length != N");
  }
  for (const auto& v : g_r) {
    if (v.size() != n) throw std::invalid_argument("ChannelSet: g_r length != N");
  }
  int next = 0;
  for (const auto& r : irs_offsets) {
    if (r.offset != next || r.size < 0) {
      throw std::invalid_argument("ChannelSet: irs_offsets do not tile the element range");
    }
    next += r.size;
  }
  if (next != n) throw std::invalid_argument("ChannelSet: irs_offsets do not sum to N");
  if (!F.allFinite()) throw std::invalid_argument("ChannelSet: non-finite F");
}

ChannelSet ChannelSet::without_irs() const {
  ChannelSet out;
  out.h_d = h_d;
  out.g_d = g_d;
  out.h_r.assign(h_d.size(), CVector(0));
  out.g_r.assign(g_d.size(), CVector(0));
  out.F = CMatrix(0, M());
  return out;
}

PhaseShifts PhaseShifts::from_unit(const CVector& u) {
  PhaseShifts p{RVector(u.size())};
  for (Eigen::Index n = 0; n < u.size(); ++n) {
    double a = std::arg(u(n));
    if (a < 0.0) a += kTwoPi;
    if (a >= kTwoPi) a -= kTwoPi;
    p.theta(n) = a;
  }
  return p;
}

CVector PhaseShifts::unit() const {
  CVector u(theta.size());
  for (Eigen::Index n = 0; n < theta.size(); ++n) u(n) = std::polar(1.0, theta(n));
  return u;
}

double wavelength_from_carrier(double carrier_freq) {
  if (!(carrier_freq > 0.0)) throw std::domain_error("carrier frequency must be > 0");
  return kSpeedOfLight / carrier_freq;
}

double path_loss(double d, double alpha, double wavelength) {
  if (!(d > 0.0)) throw std::domain_error("path_loss: distance must be > 0");
  const double c0 = std::pow(wavelength / (4.0 * kPi), 2);
  return c0 * std::pow(d, -alpha);  // D0 = 1 m
}

namespace {

CVector draw_direct(const Scenario& sc, Vec3 user, StreamTag tag, int index, double wl) {
  Rng rng(sc.seed, tag, static_cast<std::uint64_t>(index));
  const double amp = std::sqrt(path_loss(distance(sc.ap_position, user), sc.alpha_ap_user, wl) *
                               db_to_linear(sc.ap_antenna_gain_dbi));
  CVector v(sc.ap_antennas);
  for (int m = 0; m < sc.ap_antennas; ++m) v(m) = amp * rng.complex_normal();
  return v;
}

CVector draw_reflected(const Scenario& sc, Vec3 user, StreamTag tag, int index, double wl) {
  Rng rng(sc.seed, tag, static_cast<std::uint64_t>(index));
  const double gain = db_to_linear(sc.ap_antenna_gain_dbi) * db_to_linear(sc.irs_element_gain_dbi);
  CVector v(sc.total_elements());
  int n = 0;
  for (const auto& irs : sc.irs_list) {
    for (const auto& e : irs.element_positions()) {
      const double amp = std::sqrt(path_loss(distance(e, user), sc.alpha_irs_user, wl) * gain);
      v(n++) = amp * rng.complex_normal();
    }
  }
  return v;
}

}  // namespace

ChannelSet generate_channels(const Scenario& sc) {
  sc.validate();
  const double wl = sc.resolved_wavelength();
  const int m = sc.ap_antennas;
  ChannelSet cs;
  cs.F = CMatrix::Zero(sc.total_elements(), m);

  int offset = 0;
  for (std::size_t l = 0; l < sc.irs_list.size(); ++l) {
    const auto& irs = sc.irs_list[l];
    double gain = path_loss(distance(sc.ap_position, irs.reference_position), sc.alpha_ap_irs, wl);
    if (sc.irs_gain_applications == 2) gain *= db_to_linear(sc.irs_element_gain_dbi);
    const double amp = std::sqrt(gain);
    const Fading fading = irs.f_fading.value_or(sc.f_fading);
    Rng rng(sc.seed, StreamTag::ApIrs, l);
    for (int r = 0; r < irs.size(); ++r) {
      for (int c = 0; c < m; ++c) {
        cs.F(offset + r, c) = fading == Fading::LosAllOnes ? cd(amp, 0.0) : amp * rng.complex_normal();
      }
    }
    cs.irs_offsets.push_back({offset, irs.size()});
    offset += irs.size();
  }

  for (std::size_t i = 0; i < sc.iu_list.size(); ++i) {
    const int idx = static_cast<int>(i);
    cs.h_d.push_back(draw_direct(sc, sc.iu_list[i], StreamTag::IuDirect, idx, wl));
    cs.h_r.push_back(draw_reflected(sc, sc.iu_list[i], StreamTag::IuReflected, idx, wl));
  }
  for (std::size_t j = 0; j < sc.eu_list.size(); ++j) {
    const int idx = static_cast<int>(j);
    cs.g_d.push_back(draw_direct(sc, sc.eu_list[j], StreamTag::EuDirect, idx, wl));
    cs.g_r.push_back(draw_reflected(sc, sc.eu_list[j], StreamTag::EuReflected, idx, wl));
  }
  return cs;
}

namespace {

CVector combine(const CVector& direct, const CVector& reflected, const CMatrix& F, const CVector& u) {
  if (F.rows() == 0) return direct;
  // h = F^H diag(conj(u)) h_r + h_d
  const CVector weighted = reflected.cwiseProduct(u.conjugate());
  return F.adjoint() * weighted + direct;
}

}  // namespace

CVector effective_channel(const ChannelSet& cs, const PhaseShifts& phases, UserKind kind, int index) {
  if (phases.size() != cs.N()) {
    throw std::invalid_argument("effective_channel: phase vector length != N");
  }
  const auto& direct = kind == UserKind::Iu ? cs.h_d : cs.g_d;
  const auto& reflected = kind == UserKind::Iu ? cs.h_r : cs.g_r;
  if (index < 0 || index >= static_cast<int>(direct.size())) {
    throw std::out_of_range("effective_channel: user index out of range");
  }
  return combine(direct[index], reflected[index], cs.F, phases.unit());
}

EffectiveChannels effective_channels(const ChannelSet& cs, const PhaseShifts& phases) {
  if (phases.size() != cs.N()) {
    throw std::invalid_argument("effective_channels: phase vector length != N");
  }
  const CVector u = phases.unit();
  EffectiveChannels eff;
  eff.h.reserve(cs.h_d.size());
  eff.g.reserve(cs.g_d.size());
  for (int i = 0; i < cs.K_I(); ++i) eff.h.push_back(combine(cs.h_d[i], cs.h_r[i], cs.F, u));
  for (int j = 0; j < cs.K_E(); ++j) eff.g.push_back(combine(cs.g_d[j], cs.g_r[j], cs.F, u));
  return eff;
}

ChannelSet freeze_phases(const ChannelSet& cs, const PhaseShifts& phases) {
  const EffectiveChannels eff = effective_channels(cs, phases);
  ChannelSet out;
  out.h_d = eff.h;
  out.g_d = eff.g;
  out.h_r.assign(eff.h.size(), CVector(0));
  out.g_r.assign(eff.g.size(), CVector(0));
  out.F = CMatrix(0, cs.M());
  return out;
}

}  // namespace irs_swipt
