#pragma once

#include "risuav/channel.hpp"

#include <cstdint>
#include <vector>

namespace risuav {

/// Reflection coefficients of the surface. Every entry has unit modulus.
class RisPhaseVector {
 public:
  static constexpr double kModulusTolerance = 1e-9;

  /// Throws DomainError unless |theta_i| = 1 within kModulusTolerance.
  explicit RisPhaseVector(Eigen::VectorXcd coefficients);

  /// exp(j * phase_i).
  static RisPhaseVector from_phases(const Eigen::VectorXd& phases);

  const Eigen::VectorXcd& coefficients() const { return coefficients_; }
  int size() const { return static_cast<int>(coefficients_.size()); }
  cdouble operator[](int i) const { return coefficients_[i]; }

 private:
  Eigen::VectorXcd coefficients_;
};

/// Lifted objective R over the extended vector [theta; t].
struct QuadraticForm {
  Eigen::MatrixXcd matrix;
  std::vector<int> subcarrier_subset;

  int dimension() const { return static_cast<int>(matrix.rows()); }
};

struct SolverOptions {
  /// Factorization rank; 0 selects ceil(sqrt(2 * (N + 1))).
  int rank = 0;
  int max_iterations = 5000;
  double tolerance = 1e-8;
  int restarts = 3;
  std::uint64_t seed = 0;
  int randomization_samples = 1000;
  /// Upper bound on the number of subcarriers used to build R.
  int subset_size = 256;
  int ascent_max_passes = 50;
  double ascent_tolerance = 1e-6;
};

struct SdrSolution {
  /// U with unit-norm rows; the relaxed matrix is V = U U^H.
  Eigen::MatrixXcd gram_factor;
  /// Tr(R V).
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Total composite channel power f(theta) = sum_n |direct(n) + cascade(n,:) theta|^2.
double power_objective(const FrequencyChannel& freq, const Eigen::VectorXcd& theta);
double power_objective(const FrequencyChannel& freq, const RisPhaseVector& theta);

/// v^H R v for an extended vector v = [theta; t].
double lifted_value(const QuadraticForm& form, const Eigen::VectorXcd& extended);

/// `count` uniformly spaced indices in [0, K).
std::vector<int> uniform_subset(int num_subcarriers, int count);

QuadraticForm build_quadratic(const FrequencyChannel& freq, int subset_size);

/// Low-rank (Burer-Monteiro) ascent on max Tr(R V) s.t. V >= 0, diag(V) = 1.
/// Throws DomainError when R is not Hermitian or not PSD.
SdrSolution sdr_solve(const QuadraticForm& form, const SolverOptions& opts);

/// Gaussian randomization around the relaxed solution. The candidate set always
/// contains the all-ones vector and a coordinate-ascent refinement of the best draw.
RisPhaseVector randomize_extract(const SdrSolution& solution, const QuadraticForm& form,
                                 const FrequencyChannel& freq, int num_samples, Rng& rng,
                                 const SolverOptions& opts = {});

struct AscentTrace {
  RisPhaseVector theta;
  /// Objective before the first pass and after every pass.
  std::vector<double> objective;
  int passes = 0;
};

/// Cyclic exact per-element maximization of power_objective.
AscentTrace coordinate_ascent_traced(const RisPhaseVector& theta0, const FrequencyChannel& freq,
                                     int max_passes = 50, double rel_tolerance = 1e-6);
RisPhaseVector coordinate_ascent(const RisPhaseVector& theta0, const FrequencyChannel& freq,
                                 int max_passes = 50);

inline constexpr double kBruteForceBudget = 1e6;

/// Exhaustive search over `levels` uniformly spaced phases per element.
/// Ties go to the lexicographically smallest phase-index tuple. Throws
/// DomainError when levels^N exceeds kBruteForceBudget.
RisPhaseVector brute_force(const FrequencyChannel& freq, int levels);

/// All-ones surface (passive metal sheet).
RisPhaseVector unconfigured(int n_elements);

struct SdrOutcome {
  RisPhaseVector theta;
  double relaxation_objective = 0.0;
  bool converged = true;
  /// Set when the cascade is identically zero and the all-ones vector was returned.
  bool degenerate = false;
};

/// Full configuration pipeline: build R, solve the relaxation, extract.
SdrOutcome configure_sdr(const FrequencyChannel& freq, const SolverOptions& opts, Rng& rng);

}  // namespace risuav
