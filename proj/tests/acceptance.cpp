// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include "risuav/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

using namespace risuav;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

int g_failures = 0;

void report(const std::string& name, const Verdict& v, double seconds) {
  std::printf("[%s] %s (%.1f s)%s%s\n", v.pass ? "PASS" : "FAIL", name.c_str(), seconds,
              v.detail.empty() ? "" : ": ", v.detail.c_str());
  std::fflush(stdout);
  if (!v.pass) ++g_failures;
}

void run(const std::string& name, const std::function<Verdict()>& body) {
  const auto start = Clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail = std::string("exception: ") + e.what();
  }
  report(name, v, std::chrono::duration<double>(Clock::now() - start).count());
}

// Mean rate per method, in sweep order.
std::map<std::string, std::vector<double>> curves(const SweepResult& r) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& row : r.rows) out[row.method].push_back(row.rate_mbps_mean);
  return out;
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return false;
  }
  return true;
}

std::string fmt(const std::vector<double>& v) {
  std::string s = "[";
  char buf[32];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%s%.4f", i ? ", " : "", v[i]);
    s += buf;
  }
  return s + "]";
}

ExperimentConfig paper_config() {
  ExperimentConfig c;
  c.trials = 50;
  c.master_seed = 1;
  c.threads = 1;
  return c;
}

std::string g_elements_csv;

}  // namespace

int main() {
  run("Fig. 4a trend: SDR > unconfigured and both increasing in K (N=400, 50 trials, seed 1, < 10 min)", [] {
    const auto start = Clock::now();
    const auto res = sweep_subcarriers(paper_config());
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    auto c = curves(res);
    Verdict v;
    for (std::size_t i = 0; i < c["sdr"].size(); ++i) {
      v.require(c["sdr"][i] > c["unconfigured"][i], "SDR not above unconfigured at K index " + std::to_string(i));
    }
    v.require(strictly_increasing(c["sdr"]), "SDR curve not increasing " + fmt(c["sdr"]));
    v.require(strictly_increasing(c["unconfigured"]), "unconfigured curve not increasing " + fmt(c["unconfigured"]));
    v.require(secs < 600.0, "runtime above 10 min");
    if (v.pass) v.detail = "sdr " + fmt(c["sdr"]) + " unconfigured " + fmt(c["unconfigured"]);
    return v;
  });

  run("Fig. 4b trend: unconfigured flat within +-5% and SDR increasing in N (K=1000)", [] {
    const auto res = sweep_elements(paper_config());
    g_elements_csv = format_csv(res);
    auto c = curves(res);
    Verdict v;
    const auto& flat = c["unconfigured"];
    double mean = 0.0;
    for (double x : flat) mean += x;
    mean /= static_cast<double>(flat.size());
    double worst = 0.0;
    for (double x : flat) worst = std::max(worst, std::abs(x / mean - 1.0));
    v.require(worst <= 0.05, "unconfigured deviates " + std::to_string(100 * worst) + "% from its mean");
    v.require(strictly_increasing(c["sdr"]), "SDR curve not increasing " + fmt(c["sdr"]));
    if (v.pass) {
      v.detail = "sdr " + fmt(c["sdr"]) + " unconfigured " + fmt(flat) + " max deviation " +
                 std::to_string(100 * worst) + "%";
    }
    return v;
  });

  run("Fig. 4c trend: SDR >= unconfigured at every SNR and both increasing (N=400, K=1000)", [] {
    const auto res = sweep_snr(paper_config());
    auto c = curves(res);
    Verdict v;
    for (std::size_t i = 0; i < c["sdr"].size(); ++i) {
      v.require(c["sdr"][i] >= c["unconfigured"][i], "SDR below unconfigured at SNR index " + std::to_string(i));
    }
    v.require(strictly_increasing(c["sdr"]), "SDR curve not increasing");
    v.require(strictly_increasing(c["unconfigured"]), "unconfigured curve not increasing");
    if (v.pass) v.detail = "sdr " + fmt(c["sdr"]) + " unconfigured " + fmt(c["unconfigured"]);
    return v;
  });

  run("Oracle equivalence: pipeline >= 0.95 x 16-level optimum and relaxation >= optimum (100 instances, < 2 min)",
      [] {
        const auto start = Clock::now();
        const auto rep = run_oracle_check(2024, 100);
        const double secs = std::chrono::duration<double>(Clock::now() - start).count();
        Verdict v;
        v.require(rep.instances.size() == 100, "wrong instance count");
        for (const auto& inst : rep.instances) {
          v.require(inst.num_elements <= 4 && inst.num_subcarriers <= 8, "instance outside N<=4, K<=8");
        }
        v.require(rep.ratio_failures == 0, std::to_string(rep.ratio_failures) + " instances below 0.95");
        v.require(rep.bound_failures == 0, std::to_string(rep.bound_failures) + " relaxation bound violations");
        v.require(secs < 120.0, "runtime above 2 min");
        if (v.pass) v.detail = "worst ratio " + std::to_string(rep.worst_ratio);
        return v;
      });

  run("Numerical invariants: Parseval 1e-9 on random multipath draws", [] {
    Verdict v;
    const SystemGeometry g;
    ChannelParams p;
    p.num_elements = 8;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto real = draw_realization(g, p, derive_seed(77, seed));
      double taps = 0.0;
      for (const auto& t : real.direct_taps) taps += std::norm(t.gain);
      for (int k : {32, 64, 1000}) {
        const auto f = to_frequency_domain(real, k);
        double sum = 0.0;
        for (int n = 0; n < k; ++n) sum += std::norm(f.direct[n]);
        worst = std::max(worst, std::abs(sum / (k * taps) - 1.0));
      }
    }
    v.require(worst < 1e-9, "relative error " + std::to_string(worst));
    return v;
  });

  run("Numerical invariants: R Hermitian (1e-12) and PSD (min eig >= -1e-9 trace)", [] {
    Verdict v;
    const SystemGeometry g;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      ExperimentConfig c;
      c.channel.num_elements = 32 + 8 * static_cast<int>(seed % 4);
      c.channel.num_subcarriers = 64;
      const auto real = draw_realization(g, c.channel, seed);
      const auto f = to_frequency_domain(real, 64);
      for (const auto& form : {build_quadratic(f, 64), build_quadratic(f, 16)}) {
        const auto& r = form.matrix;
        v.require((r - r.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * r.cwiseAbs().maxCoeff(), "not Hermitian");
        const double min_eig =
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(r, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
        v.require(min_eig >= -1e-9 * r.trace().real(), "not PSD");
      }
    }
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed);
      const auto f = random_frequency_channel(48, 10, rng);
      const QuadraticForm form = build_quadratic(f, 48);
      const auto& r = form.matrix;
      const double min_eig =
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(r, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
      v.require(min_eig >= -1e-9 * r.trace().real(), "random instance not PSD");
    }
    return v;
  });

  run("Numerical invariants: unit-modulus outputs (1e-9) and coordinate-ascent monotonicity (every pass)", [] {
    Verdict v;
    double worst_mod = 0.0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      Rng rng(derive_seed(5, seed));
      const auto f = random_frequency_channel(32, 12, rng);
      const auto sdr = configure_sdr(f, SolverOptions{}, rng);
      const auto bf = brute_force(random_frequency_channel(4, 3, rng), 8);
      Eigen::VectorXd phases(12);
      for (int i = 0; i < 12; ++i) phases[i] = std::uniform_real_distribution<double>(-kPi, kPi)(rng);
      const auto trace = coordinate_ascent_traced(RisPhaseVector::from_phases(phases), f, 50);
      for (const RisPhaseVector* t : {&sdr.theta, &bf, &trace.theta}) {
        for (int i = 0; i < t->size(); ++i) worst_mod = std::max(worst_mod, std::abs(std::abs((*t)[i]) - 1.0));
      }
      for (std::size_t p = 1; p < trace.objective.size(); ++p) {
        v.require(trace.objective[p] >= trace.objective[p - 1], "ascent decreased at pass " + std::to_string(p));
      }
    }
    v.require(worst_mod <= 1e-9, "modulus error " + std::to_string(worst_mod));
    return v;
  });

  run("Numerical invariants: global-phase invariance of f (1e-10) and rate scaling invariance (1e-12)", [] {
    Verdict v;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Rng rng(derive_seed(6, seed));
      const auto f = random_frequency_channel(16, 6, rng);
      const auto form = build_quadratic(f, 16);
      Eigen::VectorXd phases(6);
      for (int i = 0; i < 6; ++i) phases[i] = std::uniform_real_distribution<double>(-kPi, kPi)(rng);
      const auto theta = RisPhaseVector::from_phases(phases);
      const double ref = power_objective(f, theta);
      for (double phi : {0.0, kPi / 3.0, kPi}) {
        const cdouble rot = std::polar(1.0, phi);
        Eigen::VectorXcd ext(7);
        ext.head(6) = theta.coefficients() * rot;
        ext[6] = rot;
        v.require(std::abs(lifted_value(form, ext) - ref) <= 1e-10 * ref, "phase invariance broken");
      }

      const OfdmParams p{16, 4, 1e7, 10.0};
      const Eigen::VectorXcd h = composite_channel(f, theta);
      const cdouble gain = complex_gaussian(rng, 5.0);
      const double base = achievable_rate(h, 0.3, p).rate_mbps;
      const double scaled = achievable_rate(h * gain, 0.3 * std::norm(gain), p).rate_mbps;
      v.require(std::abs(scaled - base) <= 1e-12 * base, "rate scaling broken");
    }
    return v;
  });

  run("Numerical invariants: paired SDR-vs-all-ones rate dominance in 100% of 500 trials (N=32, K=64)", [] {
    ExperimentConfig c;
    c.channel.num_elements = 32;
    c.channel.num_subcarriers = 64;
    c.trials = 500;
    c.master_seed = 3;
    c.sweep = {SweepVariable::Elements, {32}};
    const auto res = run_sweep(c);
    Verdict v;
    int rate_violations = 0;
    int power_violations = 0;
    for (const auto& o : res.outcomes) {
      if (o.methods[0].rate_mbps < o.methods[1].rate_mbps) ++rate_violations;
      if (o.methods[0].power_objective < o.methods[1].power_objective) ++power_violations;
    }
    v.require(res.outcomes.size() == 500, "wrong trial count");
    v.require(power_violations == 0, std::to_string(power_violations) + " power-objective violations");
    v.require(rate_violations == 0, std::to_string(rate_violations) + "/500 trials with SDR rate below all-ones");

    int fallbacks = 0;
    for (const auto& o : res.outcomes) fallbacks += o.methods[0].fell_back ? 1 : 0;
    c.rate_safeguard = false;
    int raw_violations = 0;
    for (const auto& o : run_sweep(c).outcomes) {
      if (o.methods[0].rate_mbps < o.methods[1].rate_mbps) ++raw_violations;
    }
    v.note(std::to_string(fallbacks) + " rate-safeguard fallbacks; " + std::to_string(raw_violations) +
           "/500 below all-ones with the safeguard off");
    return v;
  });

  run("Determinism: identical config+seed gives a byte-identical CSV for any thread count", [] {
    Verdict v;
    ExperimentConfig c = paper_config();
    c.threads = 4;
    const std::string again = format_csv(sweep_elements(c));
    v.require(!g_elements_csv.empty(), "reference sweep missing");
    v.require(again == g_elements_csv, "CSV differs between thread counts");

    ExperimentConfig small;
    small.channel.num_elements = 24;
    small.channel.num_subcarriers = 64;
    small.trials = 6;
    small.channel_seeding = ChannelSeeding::PerPoint;
    small.sweep = {SweepVariable::Snr, {-10, 0, 10}};
    small.threads = 1;
    const std::string serial = format_csv(run_sweep(small));
    small.threads = 5;
    v.require(format_csv(run_sweep(small)) == serial, "per-point seeding differs between thread counts");
    return v;
  });

  std::printf("%s: %d criterion(s) failed\n", g_failures == 0 ? "ACCEPTED" : "REJECTED", g_failures);
  return g_failures == 0 ? 0 : 1;
}
