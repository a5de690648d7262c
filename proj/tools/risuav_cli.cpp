// risuav: Monte-Carlo rate sweeps for a RIS-on-UAV relayed OFDM downlink.
//
//   risuav sweep-subcarriers --trials 50 --seed 1 --out fig_a.csv
//   risuav sweep-elements --config cfg.json --out fig_b.csv
//   risuav sweep-snr --methods sdr,unconfigured --out fig_c.csv
//   risuav single --config cfg.json
//   risuav oracle-check --seed 7
//
// Exit codes: 0 success, 1 configuration error, 2 runtime/numeric error.

#include "risuav/harness.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> threads;
  std::string out;
  std::string methods;
};

risuav::ExperimentConfig resolve_config(const CommonFlags& flags) {
  risuav::ExperimentConfig cfg;
  if (!flags.config_path.empty()) cfg = risuav::load_config(flags.config_path);
  if (flags.seed) cfg.master_seed = *flags.seed;
  if (flags.trials) cfg.trials = *flags.trials;
  if (flags.threads) cfg.threads = *flags.threads;
  if (!flags.methods.empty()) cfg.methods = risuav::parse_methods(flags.methods);
  return cfg;
}

void emit(const risuav::SweepResult& result, const CommonFlags& flags) {
  if (flags.out.empty()) {
    std::cout << risuav::format_csv(result);
  } else {
    risuav::write_results(result, flags.out);
    std::cerr << "wrote " << flags.out << " and " << flags.out << ".config.json\n";
  }
}

int run_oracle(const CommonFlags& flags) {
  risuav::ExperimentConfig cfg = resolve_config(flags);
  const int instances = flags.trials.value_or(100);
  const auto report = risuav::run_oracle_check(cfg.master_seed, instances, cfg.solver);
  std::printf("instances=%d worst_ratio=%.6f ratio_failures=%d bound_failures=%d\n", instances,
              report.worst_ratio, report.ratio_failures, report.bound_failures);
  std::printf("%s\n", report.passed() ? "PASS" : "FAIL");
  return report.passed() ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-UAV OFDM downlink simulator"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "Master seed");
    sub->add_option("--trials", flags.trials, "Monte-Carlo trials per point (oracle-check: instances)");
    sub->add_option("--out", flags.out, "Output CSV path (stdout when omitted)");
    sub->add_option("--methods", flags.methods, "Comma-separated subset of sdr,unconfigured");
    sub->add_option("--threads", flags.threads, "Worker threads (0 = all cores)");
  };

  auto* sub_k = app.add_subcommand("sweep-subcarriers", "Rate versus number of subcarriers");
  auto* sub_n = app.add_subcommand("sweep-elements", "Rate versus number of RIS elements");
  auto* sub_snr = app.add_subcommand("sweep-snr", "Rate versus reference SNR");
  auto* sub_single = app.add_subcommand("single", "Evaluate the configured scenario at one point");
  auto* sub_oracle = app.add_subcommand("oracle-check", "Compare the SDR pipeline with exhaustive search");
  for (auto* sub : {sub_k, sub_n, sub_snr, sub_single, sub_oracle}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (sub_oracle->parsed()) return run_oracle(flags);

    risuav::ExperimentConfig cfg = resolve_config(flags);
    const auto start = std::chrono::steady_clock::now();
    risuav::SweepResult result;
    if (sub_k->parsed()) {
      result = risuav::sweep_subcarriers(cfg);
    } else if (sub_n->parsed()) {
      result = risuav::sweep_elements(cfg);
    } else if (sub_snr->parsed()) {
      result = risuav::sweep_snr(cfg);
    } else {
      cfg.sweep.variable = risuav::SweepVariable::Elements;
      cfg.sweep.values = {static_cast<double>(cfg.channel.num_elements)};
      result = risuav::run_sweep(cfg);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    emit(result, flags);
    std::cerr << "completed " << result.outcomes.size() << " trials in " << secs << " s\n";
    return 0;
  } catch (const risuav::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
