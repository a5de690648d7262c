#pragma once

#include "risuav/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace risuav {

/// Node placement of the downlink scenario: base station, RIS-carrying UAV
/// and IoT receiver, all in meters.
struct SystemGeometry {
  Vec3 bs_pos{20.0, -300.0, 0.0};
  Vec3 uav_pos{0.0, 0.0, 100.0};
  Vec3 iot_pos{20.0, 0.0, 0.0};
  double carrier_freq = 2e9;
  /// Element pitch in meters; non-positive means half a wavelength.
  double element_spacing = 0.0;
  /// Axis normal to the RIS plane: "x", "y" or "z" (horizontal panel).
  std::string panel_normal = "z";

  double wavelength() const { return kSpeedOfLight / carrier_freq; }
  double spacing() const { return element_spacing > 0.0 ? element_spacing : wavelength() / 2.0; }

  /// Throws DomainError when positions coincide or scalars are non-positive.
  void validate() const;
};

struct ChannelParams {
  int num_taps = 23;
  int cp_len = 32;
  /// Scale of the exponential power-delay profile, in samples.
  double decay_const = 8.0;
  double bandwidth = 1e7;
  int num_subcarriers = 1000;
  int num_elements = 400;
  /// Extra attenuation applied on top of free space for the NLoS BS-IoT link.
  double nlos_excess_db = 20.0;

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

struct Tap {
  int delay = 0;
  cdouble gain;
};

/// One Monte-Carlo draw of all links.
struct ChannelRealization {
  std::vector<Tap> direct_taps;
  /// Frequency-flat BS -> element -> IoT product gain, one per element.
  Eigen::VectorXcd cascade_per_element;
  int cascade_delay = 0;
  std::uint64_t rng_seed = 0;
};

/// Per-subcarrier view: direct(n) and cascade(n, i).
struct FrequencyChannel {
  Eigen::VectorXcd direct;
  Eigen::MatrixXcd cascade;

  int num_subcarriers() const { return static_cast<int>(direct.size()); }
  int num_elements() const { return static_cast<int>(cascade.cols()); }
};

/// Free-space path loss in dB. Throws DomainError for non-positive inputs.
double path_loss_fspl(double distance, double freq);

/// Amplitude gain 10^(-FSPL/20).
double fspl_amplitude(double distance, double freq);

/// Square grid of ceil(sqrt(N)) x ceil(sqrt(N)) element sites, row-major,
/// truncated to N, centered on the UAV in the panel plane.
std::vector<Vec3> element_positions(const SystemGeometry& geometry, int n_elements);

/// Normalized exponential profile: variance(tau) ~ exp(-tau/decay), summing to total_power.
std::vector<double> tap_variances(const std::vector<int>& delays, double decay_const,
                                  double total_power);

/// Rayleigh multipath taps at distinct random integer delays in [0, cp_len).
std::vector<Tap> gen_direct_channel(const ChannelParams& params, double avg_power_db, Rng& rng);

/// Deterministic LoS cascade. Takes no RNG: the link has no fading.
Eigen::VectorXcd gen_cascaded_channel(const SystemGeometry& geometry, const ChannelParams& params);

/// Average received power of the direct link (negative FSPL minus NLoS excess), in dB.
double direct_link_power_db(const SystemGeometry& geometry, const ChannelParams& params);

/// Draws a full realization from a stream seeded with `seed`.
ChannelRealization draw_realization(const SystemGeometry& geometry, const ChannelParams& params,
                                    std::uint64_t seed);

FrequencyChannel to_frequency_domain(const ChannelRealization& realization, int num_subcarriers);

}  // namespace risuav
