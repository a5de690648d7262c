#include "risuav/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace risuav {

void SystemGeometry::validate() const {
  if (!(carrier_freq > 0.0) || !std::isfinite(carrier_freq)) {
    throw DomainError("carrier_freq must be positive");
  }
  if (element_spacing < 0.0 || !std::isfinite(element_spacing)) {
    throw DomainError("element_spacing must be positive (or 0 for half-wavelength)");
  }
  if (panel_normal != "x" && panel_normal != "y" && panel_normal != "z") {
    throw DomainError("panel_normal must be one of x, y, z");
  }
  if ((bs_pos - uav_pos).norm() == 0.0 || (uav_pos - iot_pos).norm() == 0.0 ||
      (bs_pos - iot_pos).norm() == 0.0) {
    throw DomainError("node positions must be pairwise distinct");
  }
}

void ChannelParams::validate() const {
  if (num_taps < 1) throw ConfigError("num_taps must be >= 1");
  if (num_taps > cp_len) throw ConfigError("num_taps must not exceed cp_len");
  if (cp_len > num_subcarriers) throw ConfigError("cp_len must not exceed num_subcarriers");
  if (!(decay_const > 0.0)) throw ConfigError("decay_const must be positive");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw ConfigError("bandwidth must be positive");
  if (num_elements < 1) throw ConfigError("num_elements must be >= 1");
  if (num_subcarriers < 1) throw ConfigError("num_subcarriers must be >= 1");
  if (!std::isfinite(nlos_excess_db)) throw ConfigError("nlos_excess_db must be finite");
}

double path_loss_fspl(double distance, double freq) {
  if (!(distance > 0.0) || !(freq > 0.0)) {
    throw DomainError("path_loss_fspl: distance and frequency must be positive");
  }
  return 20.0 * std::log10(distance) + 20.0 * std::log10(freq) +
         20.0 * std::log10(4.0 * kPi / kSpeedOfLight);
}

double fspl_amplitude(double distance, double freq) {
  return std::pow(10.0, -path_loss_fspl(distance, freq) / 20.0);
}

std::vector<Vec3> element_positions(const SystemGeometry& geometry, int n_elements) {
  if (n_elements < 1) throw DomainError("element_positions: n_elements must be >= 1");
  const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_elements))));
  const double pitch = geometry.spacing();
  const double center = (side - 1) / 2.0;

  // In-plane unit axes for the requested panel orientation.
  Vec3 row_axis = Vec3::UnitY();
  Vec3 col_axis = Vec3::UnitX();
  if (geometry.panel_normal == "x") {
    col_axis = Vec3::UnitY();
    row_axis = Vec3::UnitZ();
  } else if (geometry.panel_normal == "y") {
    row_axis = Vec3::UnitZ();
  }

  std::vector<Vec3> sites;
  sites.reserve(n_elements);
  for (int idx = 0; idx < n_elements; ++idx) {
    const int row = idx / side;
    const int col = idx % side;
    sites.push_back(geometry.uav_pos + (col - center) * pitch * col_axis +
                    (row - center) * pitch * row_axis);
  }
  return sites;
}

std::vector<double> tap_variances(const std::vector<int>& delays, double decay_const,
                                  double total_power) {
  std::vector<double> var(delays.size());
  for (std::size_t l = 0; l < delays.size(); ++l) {
    var[l] = std::exp(-static_cast<double>(delays[l]) / decay_const);
  }
  const double sum = std::accumulate(var.begin(), var.end(), 0.0);
  for (double& v : var) v *= total_power / sum;
  return var;
}

std::vector<Tap> gen_direct_channel(const ChannelParams& params, double avg_power_db, Rng& rng) {
  if (params.num_taps > params.cp_len) {
    throw ConfigError("gen_direct_channel: num_taps exceeds cp_len");
  }
  if (params.num_taps < 1) throw ConfigError("gen_direct_channel: num_taps must be >= 1");
  if (!std::isfinite(avg_power_db)) throw DomainError("gen_direct_channel: avg_power_db not finite");

  std::vector<int> pool(params.cp_len);
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<int> delays;
  delays.reserve(params.num_taps);
  // Selection sampling keeps the pool order, so delays come out sorted.
  std::sample(pool.begin(), pool.end(), std::back_inserter(delays), params.num_taps, rng);

  const auto var = tap_variances(delays, params.decay_const, std::pow(10.0, avg_power_db / 10.0));
  std::vector<Tap> taps(delays.size());
  for (std::size_t l = 0; l < delays.size(); ++l) {
    taps[l] = Tap{delays[l], complex_gaussian(rng, var[l])};
  }
  return taps;
}

Eigen::VectorXcd gen_cascaded_channel(const SystemGeometry& geometry, const ChannelParams& params) {
  geometry.validate();
  const int n = params.num_elements;
  const auto sites = element_positions(geometry, n);
  const double lambda = geometry.wavelength();
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));

  Eigen::VectorXcd gains(n);
  for (int i = 0; i < n; ++i) {
    const double d1 = (geometry.bs_pos - sites[i]).norm();
    const double d2 = (sites[i] - geometry.iot_pos).norm();
    if (d1 == 0.0 || d2 == 0.0) throw DomainError("gen_cascaded_channel: element coincides with a node");
    const double amp = norm * fspl_amplitude(d1, geometry.carrier_freq) *
                       fspl_amplitude(d2, geometry.carrier_freq);
    gains[i] = std::polar(amp, -2.0 * kPi * (d1 + d2) / lambda);
  }
  return gains;
}

double direct_link_power_db(const SystemGeometry& geometry, const ChannelParams& params) {
  const double d = (geometry.bs_pos - geometry.iot_pos).norm();
  return -(path_loss_fspl(d, geometry.carrier_freq) + params.nlos_excess_db);
}

ChannelRealization draw_realization(const SystemGeometry& geometry, const ChannelParams& params,
                                    std::uint64_t seed) {
  params.validate();
  geometry.validate();
  Rng rng(seed);
  ChannelRealization out;
  out.direct_taps = gen_direct_channel(params, direct_link_power_db(geometry, params), rng);
  out.cascade_per_element = gen_cascaded_channel(geometry, params);
  out.cascade_delay = 0;
  out.rng_seed = seed;
  return out;
}

FrequencyChannel to_frequency_domain(const ChannelRealization& realization, int num_subcarriers) {
  if (num_subcarriers < 1) throw DomainError("to_frequency_domain: K must be >= 1");
  const int k = num_subcarriers;
  for (const Tap& tap : realization.direct_taps) {
    if (tap.delay < 0 || tap.delay >= k) throw DomainError("to_frequency_domain: tap delay >= K");
  }
  if (realization.cascade_delay < 0 || realization.cascade_delay >= k) {
    throw DomainError("to_frequency_domain: cascade delay >= K");
  }

  FrequencyChannel freq;
  freq.direct = Eigen::VectorXcd::Zero(k);
  for (int n = 0; n < k; ++n) {
    cdouble acc{0.0, 0.0};
    for (const Tap& tap : realization.direct_taps) {
      // Reduce n*tau mod K before scaling so large K keeps full phase accuracy.
      const long long phase_idx = (static_cast<long long>(n) * tap.delay) % k;
      acc += tap.gain * std::polar(1.0, -2.0 * kPi * static_cast<double>(phase_idx) / k);
    }
    freq.direct[n] = acc;
  }

  const auto& g = realization.cascade_per_element;
  freq.cascade.resize(k, g.size());
  for (int n = 0; n < k; ++n) {
    const long long phase_idx = (static_cast<long long>(n) * realization.cascade_delay) % k;
    const cdouble rot = std::polar(1.0, -2.0 * kPi * static_cast<double>(phase_idx) / k);
    freq.cascade.row(n) = (g * rot).transpose();
  }
  return freq;
}

}  // namespace risuav
