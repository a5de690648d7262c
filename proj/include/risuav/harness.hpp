#pragma once

#include "risuav/channel.hpp"
#include "risuav/ofdm.hpp"
#include "risuav/ris_optimizer.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace risuav {

enum class Method { Sdr, Unconfigured };
enum class SweepVariable { Subcarriers, Elements, Snr };

/// How the channel draw of a trial is seeded.
enum class ChannelSeeding {
  /// One draw per trial, shared by every sweep point (common random numbers).
  PerTrial,
  /// Independent draw per (point, trial).
  PerPoint,
};

std::string to_string(Method m);
std::string to_string(SweepVariable v);
std::string to_string(ChannelSeeding s);
Method parse_method(const std::string& s);
SweepVariable parse_sweep_variable(const std::string& s);
ChannelSeeding parse_channel_seeding(const std::string& s);

/// Comma-separated list such as "sdr,unconfigured".
std::vector<Method> parse_methods(const std::string& csv);

struct SweepSpec {
  SweepVariable variable = SweepVariable::Subcarriers;
  std::vector<double> values;
};

struct ExperimentConfig {
  SystemGeometry geometry;
  ChannelParams channel;
  double ref_snr_db = 10.0;
  SolverOptions solver;
  SweepSpec sweep;
  int trials = 50;
  std::uint64_t master_seed = 1;
  std::vector<Method> methods{Method::Sdr, Method::Unconfigured};
  ChannelSeeding channel_seeding = ChannelSeeding::PerTrial;
  /// Keep all-ones when it beats the SDR vector on the trial's actual rate.
  bool rate_safeguard = true;
  /// Worker threads; 0 means hardware concurrency. Never affects results.
  int threads = 0;

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

std::vector<double> default_sweep_values(SweepVariable v);

/// Config with the sweep variable forced to `v`; values fall back to the
/// default grid unless the config already sweeps `v`.
ExperimentConfig with_sweep(ExperimentConfig config, SweepVariable v);

/// Scenario parameters at one sweep value.
ExperimentConfig at_point(const ExperimentConfig& config, double value);

OfdmParams ofdm_params(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

struct MethodOutcome {
  Method method = Method::Unconfigured;
  double rate_mbps = 0.0;
  double power_objective = 0.0;
  /// SDR only: relaxation value of the lifted problem.
  double relaxation_objective = 0.0;
  bool degenerate = false;
  /// SDR only: the rate safeguard replaced the SDR vector by all-ones.
  bool fell_back = false;
};

struct TrialOutcome {
  int point_index = 0;
  int trial = 0;
  std::vector<MethodOutcome> methods;
};

std::uint64_t channel_seed(const ExperimentConfig& config, int point_index, int trial);
std::uint64_t solver_seed(const ExperimentConfig& config, int point_index, int trial);

/// One Monte-Carlo trial at one sweep point; every method sees the same realization.
TrialOutcome run_point(const ExperimentConfig& config, int point_index, int trial);

struct SweepRow {
  std::string sweep_var;
  double value = 0.0;
  std::string method;
  double rate_mbps_mean = 0.0;
  double rate_mbps_ci95 = 0.0;
  int trials = 0;
  std::uint64_t master_seed = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// Raw per-trial outcomes, ordered by (point, trial).
  std::vector<TrialOutcome> outcomes;
  ExperimentConfig config;
};

/// Runs every (point, trial) pair, possibly concurrently, and aggregates.
SweepResult run_sweep(const ExperimentConfig& config);
SweepResult sweep_subcarriers(const ExperimentConfig& config);
SweepResult sweep_elements(const ExperimentConfig& config);
SweepResult sweep_snr(const ExperimentConfig& config);

/// Mean and 1.96 * standard error (0 for a single sample).
std::pair<double, double> mean_ci95(const std::vector<double>& samples);

inline constexpr const char* kCsvHeader =
    "sweep_var,value,method,rate_mbps_mean,rate_mbps_ci95,trials,master_seed";

std::string format_csv(const SweepResult& result);
/// Writes the CSV and a <path>.config.json sidecar. Throws IoError.
void write_results(const SweepResult& result, const std::filesystem::path& path);
std::vector<SweepRow> parse_csv(const std::string& text);
std::vector<SweepRow> read_results(const std::filesystem::path& path);

/// Random i.i.d. Gaussian frequency channel, used by the optimality checks.
FrequencyChannel random_frequency_channel(int num_subcarriers, int num_elements, Rng& rng);

struct OracleInstance {
  int num_subcarriers = 0;
  int num_elements = 0;
  double pipeline_objective = 0.0;
  double relaxation_objective = 0.0;
  double brute_force_objective = 0.0;
};

struct OracleReport {
  std::vector<OracleInstance> instances;
  int ratio_failures = 0;
  int bound_failures = 0;
  double worst_ratio = 0.0;

  bool passed() const { return ratio_failures == 0 && bound_failures == 0; }
};

/// Compares the SDR pipeline with a 16-level exhaustive search on small
/// random instances (N <= 4, K <= 8).
OracleReport run_oracle_check(std::uint64_t seed, int instances, const SolverOptions& opts = {},
                              int levels = 16);

}  // namespace risuav
