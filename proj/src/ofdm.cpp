#include "risuav/ofdm.hpp"

#include "risuav/ris_optimizer.hpp"

#include <cmath>

namespace risuav {

void OfdmParams::validate() const {
  if (num_subcarriers < 1) throw ConfigError("num_subcarriers must be >= 1");
  if (cp_len < 0) throw ConfigError("cp_len must be >= 0");
  if (!(bandwidth > 0.0)) throw ConfigError("bandwidth must be positive");
  if (!std::isfinite(ref_snr_db)) throw ConfigError("ref_snr_db must be finite");
}

Eigen::VectorXcd composite_channel(const FrequencyChannel& freq, const Eigen::VectorXcd& theta) {
  if (theta.size() != freq.cascade.cols()) {
    throw DomainError("composite_channel: theta length does not match the number of elements");
  }
  return freq.direct + freq.cascade * theta;
}

Eigen::VectorXcd composite_channel(const FrequencyChannel& freq, const RisPhaseVector& theta) {
  return composite_channel(freq, theta.coefficients());
}

double noise_power(const FrequencyChannel& freq, const OfdmParams& params) {
  if (!std::isfinite(params.ref_snr_db)) throw DomainError("noise_power: ref_snr_db not finite");
  const double mean_power = freq.direct.squaredNorm() / static_cast<double>(freq.direct.size());
  if (!(mean_power > 0.0)) throw DomainError("noise_power: direct channel is identically zero");
  return mean_power / std::pow(10.0, params.ref_snr_db / 10.0);
}

RateResult achievable_rate(const Eigen::VectorXcd& composite, double sigma2, const OfdmParams& params) {
  if (!(sigma2 > 0.0)) throw DomainError("achievable_rate: noise power must be positive");
  params.validate();
  const double k = static_cast<double>(params.num_subcarriers);
  if (composite.size() != params.num_subcarriers) {
    throw DomainError("achievable_rate: channel length does not match num_subcarriers");
  }

  RateResult out;
  out.snr_per_subcarrier = composite.cwiseAbs2() / sigma2;
  double bits = 0.0;
  for (double snr : out.snr_per_subcarrier) bits += std::log2(1.0 + snr);
  out.rate_mbps = 1e-6 * (k / (k + params.cp_len)) * (params.bandwidth / k) * bits;
  return out;
}

}  // namespace risuav
