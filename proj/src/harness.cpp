#include "risuav/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace risuav {

namespace {

// Stream tags keep the shared channel stream apart from per-point streams.
constexpr std::uint64_t kSharedChannelTag = 0x5eed'c4a7'0000'0001ULL;
constexpr std::uint64_t kSolverTag = 1;

bool is_integral(double v) { return std::isfinite(v) && std::floor(v) == v; }

void require(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

template <typename T>
void read_key(const nlohmann::json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> known,
                    const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& item : obj.items()) {
    const bool found = std::any_of(known.begin(), known.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!found) throw ConfigError("unknown config key '" + where + "." + item.key() + "'");
  }
}

Vec3 read_vec3(const nlohmann::json& obj, const char* key, const Vec3& fallback) {
  if (!obj.contains(key)) return fallback;
  std::vector<double> v;
  read_key(obj, key, v);
  if (v.size() != 3) throw ConfigError(std::string("config key '") + key + "' needs 3 coordinates");
  return {v[0], v[1], v[2]};
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(Method m) { return m == Method::Sdr ? "sdr" : "unconfigured"; }

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::Subcarriers: return "subcarriers";
    case SweepVariable::Elements: return "elements";
    case SweepVariable::Snr: return "snr";
  }
  return "";
}

std::string to_string(ChannelSeeding s) { return s == ChannelSeeding::PerTrial ? "per_trial" : "per_point"; }

Method parse_method(const std::string& s) {
  if (s == "sdr") return Method::Sdr;
  if (s == "unconfigured") return Method::Unconfigured;
  throw ConfigError("unknown method '" + s + "'");
}

SweepVariable parse_sweep_variable(const std::string& s) {
  if (s == "subcarriers") return SweepVariable::Subcarriers;
  if (s == "elements") return SweepVariable::Elements;
  if (s == "snr") return SweepVariable::Snr;
  throw ConfigError("unknown sweep variable '" + s + "'");
}

ChannelSeeding parse_channel_seeding(const std::string& s) {
  if (s == "per_trial") return ChannelSeeding::PerTrial;
  if (s == "per_point") return ChannelSeeding::PerPoint;
  throw ConfigError("unknown channel_seeding '" + s + "'");
}

std::vector<Method> parse_methods(const std::string& csv) {
  std::vector<Method> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_method(item));
  }
  return out;
}

std::vector<double> default_sweep_values(SweepVariable v) {
  switch (v) {
    case SweepVariable::Subcarriers: return {200, 400, 600, 800, 1000};
    case SweepVariable::Elements: return {50, 100, 200, 300, 400};
    case SweepVariable::Snr: return {-10, -5, 0, 5, 10, 15, 20, 25, 30};
  }
  return {};
}

ExperimentConfig with_sweep(ExperimentConfig config, SweepVariable v) {
  if (config.sweep.variable != v || config.sweep.values.empty()) {
    config.sweep.variable = v;
    config.sweep.values = default_sweep_values(v);
  }
  return config;
}

ExperimentConfig at_point(const ExperimentConfig& config, double value) {
  ExperimentConfig out = config;
  switch (config.sweep.variable) {
    case SweepVariable::Subcarriers: out.channel.num_subcarriers = static_cast<int>(value); break;
    case SweepVariable::Elements: out.channel.num_elements = static_cast<int>(value); break;
    case SweepVariable::Snr: out.ref_snr_db = value; break;
  }
  return out;
}

OfdmParams ofdm_params(const ExperimentConfig& config) {
  return OfdmParams{config.channel.num_subcarriers, config.channel.cp_len, config.channel.bandwidth,
                    config.ref_snr_db};
}

void ExperimentConfig::validate() const {
  try {
    geometry.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  channel.validate();
  require(std::isfinite(ref_snr_db), "ref_snr_db must be finite");
  require(trials >= 1, "trials must be >= 1");
  require(!methods.empty(), "at least one method is required");
  require(std::set<Method>(methods.begin(), methods.end()).size() == methods.size(),
          "methods must not repeat");
  require(threads >= 0, "threads must be >= 0");
  require(solver.rank >= 0, "solver.rank must be >= 0");
  require(solver.max_iterations >= 1, "solver.max_iterations must be >= 1");
  require(solver.tolerance > 0.0, "solver.tolerance must be positive");
  require(solver.restarts >= 1, "solver.restarts must be >= 1");
  require(solver.randomization_samples >= 1, "solver.randomization_samples must be >= 1");
  require(solver.subset_size >= 1, "solver.subset_size must be >= 1");
  require(solver.ascent_max_passes >= 0, "solver.ascent_max_passes must be >= 0");

  require(!sweep.values.empty(), "sweep values must be non-empty");
  for (std::size_t i = 0; i < sweep.values.size(); ++i) {
    const double v = sweep.values[i];
    require(std::isfinite(v), "sweep values must be finite");
    if (i > 0) require(v > sweep.values[i - 1], "sweep values must be strictly increasing");
    if (sweep.variable != SweepVariable::Snr) {
      require(is_integral(v) && v >= 1, "subcarrier/element sweep values must be positive integers");
    }
    at_point(*this, v).channel.validate();
  }
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["geometry"] = {
      {"bs_pos", {c.geometry.bs_pos.x(), c.geometry.bs_pos.y(), c.geometry.bs_pos.z()}},
      {"uav_pos", {c.geometry.uav_pos.x(), c.geometry.uav_pos.y(), c.geometry.uav_pos.z()}},
      {"iot_pos", {c.geometry.iot_pos.x(), c.geometry.iot_pos.y(), c.geometry.iot_pos.z()}},
      {"carrier_freq", c.geometry.carrier_freq},
      {"element_spacing", c.geometry.spacing()},
      {"panel_normal", c.geometry.panel_normal},
  };
  j["channel"] = {
      {"num_taps", c.channel.num_taps},
      {"cp_len", c.channel.cp_len},
      {"decay_const", c.channel.decay_const},
      {"bandwidth", c.channel.bandwidth},
      {"num_subcarriers", c.channel.num_subcarriers},
      {"num_elements", c.channel.num_elements},
      {"nlos_excess_db", c.channel.nlos_excess_db},
  };
  j["ofdm"] = {{"ref_snr_db", c.ref_snr_db}};
  j["solver"] = {
      {"rank", c.solver.rank},
      {"max_iterations", c.solver.max_iterations},
      {"tolerance", c.solver.tolerance},
      {"restarts", c.solver.restarts},
      {"randomization_samples", c.solver.randomization_samples},
      {"subset_size", c.solver.subset_size},
      {"ascent_max_passes", c.solver.ascent_max_passes},
      {"ascent_tolerance", c.solver.ascent_tolerance},
  };
  j["sweep"] = {{"variable", to_string(c.sweep.variable)}, {"values", c.sweep.values}};
  j["trials"] = c.trials;
  j["master_seed"] = c.master_seed;
  std::vector<std::string> methods;
  for (Method m : c.methods) methods.push_back(to_string(m));
  j["methods"] = methods;
  j["channel_seeding"] = to_string(c.channel_seeding);
  j["rate_safeguard"] = c.rate_safeguard;
  j["threads"] = c.threads;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  reject_unknown(j, {"geometry", "channel", "ofdm", "solver", "sweep", "trials", "master_seed", "methods",
                     "channel_seeding", "rate_safeguard", "threads"},
                 "config");
  if (j.contains("geometry")) {
    const auto& g = j.at("geometry");
    reject_unknown(g, {"bs_pos", "uav_pos", "iot_pos", "carrier_freq", "element_spacing", "panel_normal"},
                   "geometry");
    c.geometry.bs_pos = read_vec3(g, "bs_pos", c.geometry.bs_pos);
    c.geometry.uav_pos = read_vec3(g, "uav_pos", c.geometry.uav_pos);
    c.geometry.iot_pos = read_vec3(g, "iot_pos", c.geometry.iot_pos);
    read_key(g, "carrier_freq", c.geometry.carrier_freq);
    read_key(g, "element_spacing", c.geometry.element_spacing);
    read_key(g, "panel_normal", c.geometry.panel_normal);
  }
  if (j.contains("channel")) {
    const auto& ch = j.at("channel");
    reject_unknown(ch, {"num_taps", "cp_len", "decay_const", "bandwidth", "num_subcarriers", "num_elements",
                        "nlos_excess_db"},
                   "channel");
    read_key(ch, "num_taps", c.channel.num_taps);
    read_key(ch, "cp_len", c.channel.cp_len);
    read_key(ch, "decay_const", c.channel.decay_const);
    read_key(ch, "bandwidth", c.channel.bandwidth);
    read_key(ch, "num_subcarriers", c.channel.num_subcarriers);
    read_key(ch, "num_elements", c.channel.num_elements);
    read_key(ch, "nlos_excess_db", c.channel.nlos_excess_db);
  }
  if (j.contains("ofdm")) {
    reject_unknown(j.at("ofdm"), {"ref_snr_db"}, "ofdm");
    read_key(j.at("ofdm"), "ref_snr_db", c.ref_snr_db);
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    reject_unknown(s, {"rank", "max_iterations", "tolerance", "restarts", "randomization_samples",
                       "subset_size", "ascent_max_passes", "ascent_tolerance"},
                   "solver");
    read_key(s, "rank", c.solver.rank);
    read_key(s, "max_iterations", c.solver.max_iterations);
    read_key(s, "tolerance", c.solver.tolerance);
    read_key(s, "restarts", c.solver.restarts);
    read_key(s, "randomization_samples", c.solver.randomization_samples);
    read_key(s, "subset_size", c.solver.subset_size);
    read_key(s, "ascent_max_passes", c.solver.ascent_max_passes);
    read_key(s, "ascent_tolerance", c.solver.ascent_tolerance);
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    reject_unknown(s, {"variable", "values"}, "sweep");
    std::string var = to_string(c.sweep.variable);
    read_key(s, "variable", var);
    c.sweep.variable = parse_sweep_variable(var);
    read_key(s, "values", c.sweep.values);
  }
  read_key(j, "trials", c.trials);
  read_key(j, "master_seed", c.master_seed);
  if (j.contains("methods")) {
    std::vector<std::string> names;
    read_key(j, "methods", names);
    c.methods.clear();
    for (const auto& n : names) c.methods.push_back(parse_method(n));
  }
  if (j.contains("channel_seeding")) {
    std::string s;
    read_key(j, "channel_seeding", s);
    c.channel_seeding = parse_channel_seeding(s);
  }
  read_key(j, "rate_safeguard", c.rate_safeguard);
  read_key(j, "threads", c.threads);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed config file " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::uint64_t channel_seed(const ExperimentConfig& config, int point_index, int trial) {
  if (config.channel_seeding == ChannelSeeding::PerTrial) {
    return derive_seed(config.master_seed, kSharedChannelTag, trial);
  }
  return derive_seed(config.master_seed, point_index, trial);
}

std::uint64_t solver_seed(const ExperimentConfig& config, int point_index, int trial) {
  return derive_seed(config.master_seed, point_index, trial, kSolverTag);
}

TrialOutcome run_point(const ExperimentConfig& config, int point_index, int trial) {
  if (point_index < 0 || point_index >= static_cast<int>(config.sweep.values.size())) {
    throw ConfigError("run_point: point index out of range");
  }
  const ExperimentConfig cfg = at_point(config, config.sweep.values[point_index]);
  const ChannelRealization realization =
      draw_realization(cfg.geometry, cfg.channel, channel_seed(config, point_index, trial));
  const FrequencyChannel freq = to_frequency_domain(realization, cfg.channel.num_subcarriers);
  const OfdmParams ofdm = ofdm_params(cfg);
  const double sigma2 = noise_power(freq, ofdm);

  TrialOutcome out{point_index, trial, {}};
  for (Method method : cfg.methods) {
    MethodOutcome mo;
    mo.method = method;
    RisPhaseVector theta = unconfigured(cfg.channel.num_elements);
    if (method == Method::Sdr) {
      Rng rng(solver_seed(config, point_index, trial));
      SdrOutcome sdr = configure_sdr(freq, cfg.solver, rng);
      theta = std::move(sdr.theta);
      mo.relaxation_objective = sdr.relaxation_objective;
      mo.degenerate = sdr.degenerate;
    }
    Eigen::VectorXcd h = composite_channel(freq, theta);
    mo.rate_mbps = achievable_rate(h, sigma2, ofdm).rate_mbps;
    if (method == Method::Sdr && cfg.rate_safeguard && !mo.degenerate) {
      // Power is only a surrogate for rate; all-ones is a valid configuration too.
      const Eigen::VectorXcd h_ones = composite_channel(freq, unconfigured(cfg.channel.num_elements));
      const double rate_ones = achievable_rate(h_ones, sigma2, ofdm).rate_mbps;
      if (rate_ones > mo.rate_mbps) {
        h = h_ones;
        mo.rate_mbps = rate_ones;
        mo.fell_back = true;
      }
    }
    mo.power_objective = h.squaredNorm();
    out.methods.push_back(mo);
  }
  return out;
}

std::pair<double, double> mean_ci95(const std::vector<double>& samples) {
  if (samples.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= n;
  if (samples.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  const double stddev = std::sqrt(ss / (n - 1.0));
  return {mean, 1.96 * stddev / std::sqrt(n)};
}

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  const int points = static_cast<int>(config.sweep.values.size());
  const int trials = config.trials;
  const int tasks = points * trials;

  std::vector<TrialOutcome> outcomes(tasks);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int task = next++; task < tasks; task = next++) {
      try {
        outcomes[task] = run_point(config, task / trials, task % trials);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks;
      }
    }
  };

  int workers = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(1, tasks));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult result;
  result.config = config;
  const std::string var = to_string(config.sweep.variable);
  for (int p = 0; p < points; ++p) {
    for (std::size_t m = 0; m < config.methods.size(); ++m) {
      std::vector<double> rates;
      rates.reserve(trials);
      for (int t = 0; t < trials; ++t) rates.push_back(outcomes[p * trials + t].methods[m].rate_mbps);
      const auto [mean, ci] = mean_ci95(rates);
      result.rows.push_back(SweepRow{var, config.sweep.values[p], to_string(config.methods[m]), mean, ci,
                                     trials, config.master_seed});
    }
  }
  std::stable_sort(result.rows.begin(), result.rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return a.value != b.value ? a.value < b.value : a.method < b.method;
  });
  result.outcomes = std::move(outcomes);
  return result;
}

SweepResult sweep_subcarriers(const ExperimentConfig& config) {
  return run_sweep(with_sweep(config, SweepVariable::Subcarriers));
}

SweepResult sweep_elements(const ExperimentConfig& config) {
  return run_sweep(with_sweep(config, SweepVariable::Elements));
}

SweepResult sweep_snr(const ExperimentConfig& config) {
  return run_sweep(with_sweep(config, SweepVariable::Snr));
}

std::string format_csv(const SweepResult& result) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const SweepRow& r : result.rows) {
    out += r.sweep_var + "," + format_double(r.value) + "," + r.method + "," + format_double(r.rate_mbps_mean) +
           "," + format_double(r.rate_mbps_ci95) + "," + std::to_string(r.trials) + "," +
           std::to_string(r.master_seed) + "\n";
  }
  return out;
}

void write_results(const SweepResult& result, const std::filesystem::path& path) {
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << format_csv(result);
    if (!out) throw IoError("write failed for " + path.string());
  }
  const std::filesystem::path sidecar = path.string() + ".config.json";
  std::ofstream side(sidecar, std::ios::binary | std::ios::trunc);
  if (!side) throw IoError("cannot write " + sidecar.string());
  side << to_json(result.config).dump(2) << "\n";
  if (!side) throw IoError("write failed for " + sidecar.string());
}

std::vector<SweepRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw IoError("CSV header mismatch");
  std::vector<SweepRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 7) throw IoError("CSV line " + std::to_string(lineno) + ": expected 7 fields");
    try {
      rows.push_back(SweepRow{f[0], std::stod(f[1]), f[2], std::stod(f[3]), std::stod(f[4]), std::stoi(f[5]),
                              std::stoull(f[6])});
    } catch (const std::exception&) {
      throw IoError("CSV line " + std::to_string(lineno) + ": malformed number");
    }
  }
  return rows;
}

std::vector<SweepRow> read_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

FrequencyChannel random_frequency_channel(int num_subcarriers, int num_elements, Rng& rng) {
  FrequencyChannel f;
  f.direct.resize(num_subcarriers);
  f.cascade.resize(num_subcarriers, num_elements);
  for (int n = 0; n < num_subcarriers; ++n) f.direct[n] = complex_gaussian(rng);
  for (int i = 0; i < num_elements; ++i) {
    for (int n = 0; n < num_subcarriers; ++n) f.cascade(n, i) = complex_gaussian(rng);
  }
  return f;
}

OracleReport run_oracle_check(std::uint64_t seed, int instances, const SolverOptions& opts, int levels) {
  OracleReport report;
  report.worst_ratio = std::numeric_limits<double>::infinity();
  for (int i = 0; i < instances; ++i) {
    Rng rng(derive_seed(seed, i));
    const int n_elem = 1 + i % 4;
    const int k = 1 + (i * 3) % 8;
    const FrequencyChannel freq = random_frequency_channel(k, n_elem, rng);
    const SdrOutcome sdr = configure_sdr(freq, opts, rng);
    const double best = power_objective(freq, brute_force(freq, levels));

    OracleInstance inst{k, n_elem, power_objective(freq, sdr.theta), sdr.relaxation_objective, best};
    const double ratio = inst.pipeline_objective / best;
    report.worst_ratio = std::min(report.worst_ratio, ratio);
    if (ratio < 0.95) ++report.ratio_failures;
    if (inst.relaxation_objective < best) ++report.bound_failures;
    report.instances.push_back(inst);
  }
  return report;
}

}  // namespace risuav
