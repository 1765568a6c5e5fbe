#pragma once

#include "irs_swipt/types.hpp"

#include <optional>
#include <vector>

namespace irs_swipt {

enum class Fading { LosAllOnes, Rayleigh };

struct IrsSpec {
  Vec3 reference_position;
  int n_y = 1;
  int n_z = 1;
  double element_spacing = 0.2;
  // Overrides Scenario::f_fading for this surface's AP-IRS block.
  std::optional<Fading> f_fading;

  int size() const { return n_y * n_z; }

  // Elements lie in the y-z plane, spanning +y and +z from the reference
  // element. Element n = iz * n_y + iy.
  std::vector<Vec3> element_positions() const;
  void validate() const;
};

struct Scenario {
  Vec3 ap_position{3.5, 0.0, 0.0};
  int ap_antennas = 4;
  std::vector<IrsSpec> irs_list;
  std::vector<Vec3> iu_list;
  std::vector<Vec3> eu_list;
  double carrier_freq = 750e6;     // Hz
  double bandwidth = 1e6;          // Hz
  double noise_psd_dbm_hz = -150;  // dBm/Hz
  double alpha_ap_user = 3.8;
  double alpha_ap_irs = 2.2;
  double alpha_irs_user = 2.2;
  double ap_antenna_gain_dbi = 0.0;
  double irs_element_gain_dbi = 3.0;
  // How many times the element gain enters a reflected path: 1 applies it on
  // the IRS-user segment only, 2 also on the AP-IRS segment.
  int irs_gain_applications = 1;
  Fading f_fading = Fading::LosAllOnes;
  std::uint64_t seed = 0;
  // Explicit wavelength in meters. When absent the wavelength is twice the
  // element spacing of the first IRS (half-wavelength arrays), or c/f with no IRS.
  std::optional<double> wavelength;

  int total_elements() const;
  double resolved_wavelength() const;
  /// Receiver noise power in watts, noise_psd * bandwidth.
  double noise_power_w() const;
  void validate() const;
};

struct IndexRange {
  int offset = 0;
  int size = 0;
};

struct ChannelSet {
  std::vector<CVector> h_d;  // K_I, length M
  std::vector<CVector> g_d;  // K_E, length M
  std::vector<CVector> h_r;  // K_I, length N
  std::vector<CVector> g_r;  // K_E, length N
  CMatrix F;                 // N x M
  std::vector<IndexRange> irs_offsets;

  int M() const { return static_cast<int>(F.cols()); }
  int N() const { return static_cast<int>(F.rows()); }
  int K_I() const { return static_cast<int>(h_d.size()); }
  int K_E() const { return static_cast<int>(g_d.size()); }

  void validate() const;
  /// Same channels with the reflected links removed (N = 0).
  ChannelSet without_irs() const;
};

struct PhaseShifts {
  RVector theta;  // radians in [0, 2pi)

  static PhaseShifts zeros(int n) { return {RVector::Zero(n)}; }
  static PhaseShifts from_unit(const CVector& u);
  int size() const { return static_cast<int>(theta.size()); }
  /// u_n = exp(j theta_n)
  CVector unit() const;
};

struct NoisePowers {
  RVector sigma2;
};

/// C0 (d / 1 m)^(-alpha), C0 = (lambda / 4 pi)^2.
double path_loss(double d, double alpha, double wavelength);
double wavelength_from_carrier(double carrier_freq);

ChannelSet generate_channels(const Scenario& scenario);

/// Column vector h with h^H = h_r^H diag(u) F + h_d^H.
CVector effective_channel(const ChannelSet& cs, const PhaseShifts& phases,
                          UserKind kind, int index);

struct EffectiveChannels {
  std::vector<CVector> h;
  std::vector<CVector> g;
};

EffectiveChannels effective_channels(const ChannelSet& cs, const PhaseShifts& phases);

/// N = 0 channel set whose direct links are the effective channels at `phases`.
ChannelSet freeze_phases(const ChannelSet& cs, const PhaseShifts& phases);

}  // namespace irs_swipt
