#pragma once

#include "risuav/channel.hpp"

namespace risuav {

class RisPhaseVector;

struct OfdmParams {
  int num_subcarriers = 1000;
  int cp_len = 32;
  double bandwidth = 1e7;
  /// Average received SNR of the direct link, in dB.
  double ref_snr_db = 10.0;

  void validate() const;
};

struct RateResult {
  double rate_mbps = 0.0;
  Eigen::VectorXd snr_per_subcarrier;
};

/// H(n) = direct(n) + sum_i cascade(n, i) * theta_i. Accepts arbitrary test vectors.
Eigen::VectorXcd composite_channel(const FrequencyChannel& freq, const Eigen::VectorXcd& theta);
Eigen::VectorXcd composite_channel(const FrequencyChannel& freq, const RisPhaseVector& theta);

/// Noise variance that puts the mean direct-link SNR at ref_snr_db.
double noise_power(const FrequencyChannel& freq, const OfdmParams& params);

/// Shannon rate over all subcarriers with equal power, including the CP overhead.
RateResult achievable_rate(const Eigen::VectorXcd& composite, double sigma2, const OfdmParams& params);

}  // namespace risuav
