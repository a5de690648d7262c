#include "risuav/harness.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace risuav;

namespace {

ExperimentConfig parse_config(const std::string& json_text) {
  if (json_text.empty()) return ExperimentConfig{};
  try {
    return config_from_json(nlohmann::json::parse(json_text));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
}

py::list rows_to_python(const std::vector<SweepRow>& rows) {
  py::list out;
  for (const auto& r : rows) {
    py::dict d;
    d["sweep_var"] = r.sweep_var;
    d["value"] = r.value;
    d["method"] = r.method;
    d["rate_mbps_mean"] = r.rate_mbps_mean;
    d["rate_mbps_ci95"] = r.rate_mbps_ci95;
    d["trials"] = r.trials;
    d["master_seed"] = r.master_seed;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "RIS-on-UAV OFDM downlink simulator core";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<SystemGeometry>(m, "SystemGeometry")
      .def(py::init<>())
      .def_readwrite("bs_pos", &SystemGeometry::bs_pos)
      .def_readwrite("uav_pos", &SystemGeometry::uav_pos)
      .def_readwrite("iot_pos", &SystemGeometry::iot_pos)
      .def_readwrite("carrier_freq", &SystemGeometry::carrier_freq)
      .def_readwrite("element_spacing", &SystemGeometry::element_spacing)
      .def_readwrite("panel_normal", &SystemGeometry::panel_normal)
      .def("wavelength", &SystemGeometry::wavelength)
      .def("validate", &SystemGeometry::validate);

  py::class_<ChannelParams>(m, "ChannelParams")
      .def(py::init<>())
      .def_readwrite("num_taps", &ChannelParams::num_taps)
      .def_readwrite("cp_len", &ChannelParams::cp_len)
      .def_readwrite("decay_const", &ChannelParams::decay_const)
      .def_readwrite("bandwidth", &ChannelParams::bandwidth)
      .def_readwrite("num_subcarriers", &ChannelParams::num_subcarriers)
      .def_readwrite("num_elements", &ChannelParams::num_elements)
      .def_readwrite("nlos_excess_db", &ChannelParams::nlos_excess_db)
      .def("validate", &ChannelParams::validate);

  py::class_<ChannelRealization>(m, "ChannelRealization")
      .def_property_readonly("direct_taps",
                             [](const ChannelRealization& r) {
                               std::vector<std::pair<int, cdouble>> taps;
                               for (const auto& t : r.direct_taps) taps.emplace_back(t.delay, t.gain);
                               return taps;
                             })
      .def_readonly("cascade_per_element", &ChannelRealization::cascade_per_element)
      .def_readonly("cascade_delay", &ChannelRealization::cascade_delay)
      .def_readonly("rng_seed", &ChannelRealization::rng_seed);

  py::class_<FrequencyChannel>(m, "FrequencyChannel")
      .def(py::init([](Eigen::VectorXcd direct, Eigen::MatrixXcd cascade) {
             if (cascade.rows() != direct.size()) throw DomainError("cascade rows must equal len(direct)");
             return FrequencyChannel{std::move(direct), std::move(cascade)};
           }),
           py::arg("direct"), py::arg("cascade"))
      .def_readonly("direct", &FrequencyChannel::direct)
      .def_readonly("cascade", &FrequencyChannel::cascade)
      .def_property_readonly("num_subcarriers", &FrequencyChannel::num_subcarriers)
      .def_property_readonly("num_elements", &FrequencyChannel::num_elements);

  py::class_<OfdmParams>(m, "OfdmParams")
      .def(py::init<>())
      .def(py::init([](int k, int cp, double bw, double snr) { return OfdmParams{k, cp, bw, snr}; }),
           py::arg("num_subcarriers"), py::arg("cp_len") = 32, py::arg("bandwidth") = 1e7,
           py::arg("ref_snr_db") = 10.0)
      .def_readwrite("num_subcarriers", &OfdmParams::num_subcarriers)
      .def_readwrite("cp_len", &OfdmParams::cp_len)
      .def_readwrite("bandwidth", &OfdmParams::bandwidth)
      .def_readwrite("ref_snr_db", &OfdmParams::ref_snr_db);

  py::class_<SolverOptions>(m, "SolverOptions")
      .def(py::init<>())
      .def_readwrite("rank", &SolverOptions::rank)
      .def_readwrite("max_iterations", &SolverOptions::max_iterations)
      .def_readwrite("tolerance", &SolverOptions::tolerance)
      .def_readwrite("restarts", &SolverOptions::restarts)
      .def_readwrite("seed", &SolverOptions::seed)
      .def_readwrite("randomization_samples", &SolverOptions::randomization_samples)
      .def_readwrite("subset_size", &SolverOptions::subset_size)
      .def_readwrite("ascent_max_passes", &SolverOptions::ascent_max_passes)
      .def_readwrite("ascent_tolerance", &SolverOptions::ascent_tolerance);

  // channel
  m.def("path_loss_fspl", &path_loss_fspl, py::arg("distance"), py::arg("freq"));
  m.def("fspl_amplitude", &fspl_amplitude, py::arg("distance"), py::arg("freq"));
  m.def(
      "element_positions",
      [](const SystemGeometry& g, int n) {
        const auto sites = element_positions(g, n);
        Eigen::MatrixX3d out(sites.size(), 3);
        for (std::size_t i = 0; i < sites.size(); ++i) out.row(i) = sites[i].transpose();
        return out;
      },
      py::arg("geometry"), py::arg("n_elements"));
  m.def("gen_cascaded_channel", &gen_cascaded_channel, py::arg("geometry"), py::arg("params"));
  m.def("draw_realization", &draw_realization, py::arg("geometry"), py::arg("params"), py::arg("seed"));
  m.def("to_frequency_domain", &to_frequency_domain, py::arg("realization"), py::arg("num_subcarriers"));
  m.def(
      "random_frequency_channel",
      [](int k, int n, std::uint64_t seed) {
        Rng rng(seed);
        return random_frequency_channel(k, n, rng);
      },
      py::arg("num_subcarriers"), py::arg("num_elements"), py::arg("seed"));

  // ofdm
  m.def(
      "composite_channel",
      [](const FrequencyChannel& f, const Eigen::VectorXcd& theta) { return composite_channel(f, theta); },
      py::arg("freq"), py::arg("theta"));
  m.def("noise_power", &noise_power, py::arg("freq"), py::arg("params"));
  m.def(
      "achievable_rate",
      [](const Eigen::VectorXcd& h, double sigma2, const OfdmParams& p) {
        auto r = achievable_rate(h, sigma2, p);
        return py::make_tuple(r.rate_mbps, r.snr_per_subcarrier);
      },
      py::arg("composite"), py::arg("sigma2"), py::arg("params"));

  // ris optimizer; phase vectors cross the boundary as complex numpy arrays
  m.def(
      "power_objective",
      [](const FrequencyChannel& f, const Eigen::VectorXcd& theta) { return power_objective(f, theta); },
      py::arg("freq"), py::arg("theta"));
  m.def(
      "build_quadratic",
      [](const FrequencyChannel& f, int subset) {
        auto form = build_quadratic(f, subset);
        return py::make_tuple(form.matrix, form.subcarrier_subset);
      },
      py::arg("freq"), py::arg("subset_size"));
  m.def(
      "sdr_solve",
      [](const Eigen::MatrixXcd& r, const SolverOptions& opts) {
        auto sol = sdr_solve(QuadraticForm{r, {}}, opts);
        py::dict d;
        d["gram_factor"] = sol.gram_factor;
        d["objective"] = sol.objective;
        d["iterations"] = sol.iterations;
        d["converged"] = sol.converged;
        return d;
      },
      py::arg("matrix"), py::arg("options") = SolverOptions{});
  m.def(
      "coordinate_ascent",
      [](const Eigen::VectorXcd& theta0, const FrequencyChannel& f, int passes) {
        return coordinate_ascent(RisPhaseVector(theta0), f, passes).coefficients();
      },
      py::arg("theta0"), py::arg("freq"), py::arg("max_passes") = 50);
  m.def(
      "brute_force", [](const FrequencyChannel& f, int levels) { return brute_force(f, levels).coefficients(); },
      py::arg("freq"), py::arg("levels"));
  m.def(
      "unconfigured", [](int n) { return unconfigured(n).coefficients(); }, py::arg("n_elements"));
  m.def(
      "configure_sdr",
      [](const FrequencyChannel& f, const SolverOptions& opts, std::uint64_t seed) {
        Rng rng(seed);
        auto out = configure_sdr(f, opts, rng);
        py::dict d;
        d["theta"] = out.theta.coefficients();
        d["relaxation_objective"] = out.relaxation_objective;
        d["converged"] = out.converged;
        d["degenerate"] = out.degenerate;
        return d;
      },
      py::arg("freq"), py::arg("options") = SolverOptions{}, py::arg("seed") = 0);

  // harness; configs travel as JSON text in the same schema as --config files
  m.def(
      "resolve_config", [](const std::string& cfg) { return to_json(parse_config(cfg)).dump(); },
      py::arg("config_json") = "");
  m.def(
      "run_sweep",
      [](const std::string& cfg, const std::string& variable) {
        ExperimentConfig c = parse_config(cfg);
        SweepResult res;
        {
          py::gil_scoped_release release;
          res = variable.empty() ? run_sweep(c) : run_sweep(with_sweep(c, parse_sweep_variable(variable)));
        }
        return py::make_tuple(rows_to_python(res.rows), format_csv(res), to_json(res.config).dump());
      },
      py::arg("config_json") = "", py::arg("variable") = "");
  m.def(
      "write_sweep",
      [](const std::string& cfg, const std::string& variable, const std::string& path) {
        ExperimentConfig c = parse_config(cfg);
        py::gil_scoped_release release;
        write_results(variable.empty() ? run_sweep(c) : run_sweep(with_sweep(c, parse_sweep_variable(variable))),
                      path);
      },
      py::arg("config_json"), py::arg("variable"), py::arg("path"));
  m.def(
      "read_results", [](const std::string& path) { return rows_to_python(read_results(path)); }, py::arg("path"));
  m.def(
      "oracle_check",
      [](std::uint64_t seed, int instances) {
        auto rep = run_oracle_check(seed, instances);
        py::dict d;
        d["passed"] = rep.passed();
        d["worst_ratio"] = rep.worst_ratio;
        d["ratio_failures"] = rep.ratio_failures;
        d["bound_failures"] = rep.bound_failures;
        return d;
      },
      py::arg("seed") = 1, py::arg("instances") = 100);
}
