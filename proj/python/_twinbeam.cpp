// Python bindings. States cross the boundary as CovarianceMatrix objects with
// NumPy matrices; mode labels, bases and beams as their text names.

#include "twinbeam/cavity.hpp"
#include "twinbeam/cli.hpp"
#include "twinbeam/error.hpp"
#include "twinbeam/fwm.hpp"
#include "twinbeam/reconstruction.hpp"
#include "twinbeam/witness.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <iostream>
#include <random>

namespace py = pybind11;
using namespace pybind11::literals;
using namespace twinbeam;

namespace {

std::vector<ModeLabel> parse_modes(const std::vector<std::string>& names) {
  std::vector<ModeLabel> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(parse_mode_label(n));
  return out;
}

std::vector<std::string> mode_names(const std::vector<ModeLabel>& modes) {
  std::vector<std::string> out;
  for (const auto& m : modes) out.push_back(to_string(m));
  return out;
}

CovarianceMatrix make_state(const Eigen::MatrixXd& matrix, const std::string& basis,
                            std::optional<std::vector<std::string>> modes, double omega_hz, double delta_hz) {
  const Basis b = parse_basis(basis);
  std::vector<ModeLabel> labels;
  if (modes) {
    labels = parse_modes(*modes);
  } else {
    labels = canonical_modes(b);
    labels.resize(static_cast<std::size_t>(matrix.rows() / 2));
  }
  return CovarianceMatrix(b, std::move(labels), matrix, omega_hz, delta_hz);
}

py::dict report_dict(const WitnessReport& r) {
  py::list entries;
  for (const auto& e : r.entries) {
    entries.append(py::dict("label"_a = e.label, "basis"_a = to_string(e.basis), "dgcz"_a = e.dgcz,
                            "ppt_nu_min"_a = e.ppt_nu_min));
  }
  py::dict d("delta_hz"_a = r.delta_hz, "scenario"_a = to_string(r.scenario), "entries"_a = entries,
             "physical"_a = r.physical);
  d["dE_probe"] = r.delta_e_probe ? py::cast(*r.delta_e_probe) : py::none();
  d["dE_conj"] = r.delta_e_conjugate ? py::cast(*r.delta_e_conjugate) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_twinbeam, m) {
  m.doc() = "Twin-beam sideband covariance toolkit";

  // Messages are prefixed with the error category, e.g. "parse: ...".
  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&m] { return py::exception<Error>(m, "TwinbeamError", PyExc_ValueError); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string message = std::string(to_string(e.code())) + ": " + e.what();
      PyErr_SetString(error_type.get_stored().ptr(), message.c_str());
    }
  });

  py::class_<CovarianceMatrix>(m, "CovarianceMatrix")
      .def(py::init(&make_state), "matrix"_a, "basis"_a = "sideband", "modes"_a = py::none(),
           "omega_hz"_a = 0.0, "delta_hz"_a = 0.0)
      .def_property_readonly("matrix", &CovarianceMatrix::matrix)
      .def_property_readonly("basis", [](const CovarianceMatrix& s) { return to_string(s.basis()); })
      .def_property_readonly("modes", [](const CovarianceMatrix& s) { return mode_names(s.modes()); })
      .def_property_readonly("omega_hz", &CovarianceMatrix::omega_hz)
      .def_property_readonly("delta_hz", &CovarianceMatrix::delta_hz)
      .def("__repr__", [](const CovarianceMatrix& s) {
        return "<CovarianceMatrix " + to_string(s.basis()) + " " + std::to_string(s.mode_count()) + " modes>";
      });

  py::class_<FwmParams>(m, "FwmParams")
      .def(py::init<>())
      .def_static("defaults", &FwmParams::defaults)
      .def_readwrite("delta_max_hz", &FwmParams::delta_max_hz)
      .def_readwrite("g_max", &FwmParams::g_max)
      .def_readwrite("width_hz", &FwmParams::width_hz)
      .def_readwrite("phase_slope_rad_per_hz", &FwmParams::phase_slope_rad_per_hz)
      .def_readwrite("loss_eta_medium", &FwmParams::loss_eta_medium)
      .def("validate", &FwmParams::validate);

  py::class_<CavityParams>(m, "CavityParams")
      .def(py::init<>())
      .def_readwrite("gamma_hz", &CavityParams::gamma_hz)
      .def_readwrite("finesse", &CavityParams::finesse)
      .def_readwrite("r0_power", &CavityParams::r0_power)
      .def_readwrite("omega_hz", &CavityParams::omega_hz)
      .def_readwrite("eta_det", &CavityParams::eta_det)
      .def_property_readonly("omega_norm", &CavityParams::omega_norm)
      .def("validate", &CavityParams::validate);

  // Gaussian core.
  m.def("vacuum", [](std::size_t n, const std::string& basis) { return vacuum_covariance(n, parse_basis(basis)); },
        "n_modes"_a = 4, "basis"_a = "sideband");
  m.def("change_basis", [](const CovarianceMatrix& s, const std::string& b) { return change_basis(s, parse_basis(b)); },
        "state"_a, "basis"_a);
  m.def("symplectic_eigenvalues", py::overload_cast<const CovarianceMatrix&>(&symplectic_eigenvalues), "state"_a);
  m.def("is_physical", [](const CovarianceMatrix& s) { return is_physical(s); }, "state"_a);
  m.def("partial_transpose",
        [](const CovarianceMatrix& s, const std::vector<std::string>& modes) {
          const auto labels = parse_modes(modes);
          return partial_transpose(s, labels);
        },
        "state"_a, "modes"_a);
  m.def("attenuate", py::overload_cast<const CovarianceMatrix&, double>(&attenuate), "state"_a, "eta"_a);
  m.def("rotate_mode",
        [](const CovarianceMatrix& s, const std::string& mode, double angle) {
          return rotate_mode(s, parse_mode_label(mode), angle);
        },
        "state"_a, "mode"_a, "angle"_a);

  // Amplifier model.
  m.def("gain", &gain, "params"_a, "delta_eff_hz"_a);
  m.def("twin_beam_state", &twin_beam_state, "g1"_a, "g2"_a, "phi1"_a = 0.0, "phi2"_a = 0.0,
        "loss_eta"_a = 1.0, "omega_hz"_a = 0.0, "delta_hz"_a = 0.0);
  m.def("synthesize_state", &synthesize_state, "params"_a, "delta_hz"_a, "omega_hz"_a);

  // Detection.
  m.def("single_beam_spectrum",
        [](const CovarianceMatrix& s, const std::string& beam, const CavityParams& c, const std::vector<double>& grid,
           double phase) { return single_beam_spectrum(s, parse_beam(beam), c, grid, phase).values; },
        "state"_a, "beam"_a, "cavity"_a, "detuning"_a, "demod_phase"_a = 0.0);
  m.def("cross_spectrum",
        [](const CovarianceMatrix& s, const CavityParams& c, const std::vector<double>& dp,
           const std::vector<double>& dc, double pp, double pc) {
          return cross_spectrum_trace(s, c, c, dp, dc, pp, pc).values;
        },
        "state"_a, "cavity"_a, "detuning_probe"_a, "detuning_conjugate"_a, "phase_probe"_a = 0.0,
        "phase_conjugate"_a = 0.0);
  m.def("uniform_grid", &uniform_grid, "start"_a, "stop"_a, "count"_a);

  // Witnesses.
  m.def("dgcz",
        [](const CovarianceMatrix& s, const std::string& a, const std::string& b) {
          return dgcz(s, parse_mode_label(a), parse_mode_label(b));
        },
        "state"_a, "first"_a, "second"_a);
  m.def("ppt_pair",
        [](const CovarianceMatrix& s, const std::string& a, const std::string& b) {
          return ppt_pair(s, parse_mode_label(a), parse_mode_label(b));
        },
        "state"_a, "first"_a, "second"_a);
  m.def("sideband_energy",
        [](const CovarianceMatrix& s, const std::string& mode) { return sideband_energy(s, parse_mode_label(mode)); },
        "state"_a, "mode"_a);
  m.def("energy_imbalance",
        [](const CovarianceMatrix& s, const std::string& beam) { return energy_imbalance(s, parse_beam(beam)); },
        "state"_a, "beam"_a);
  m.def("emulate_homodyne", &emulate_homodyne, "state"_a);
  m.def("evaluate_witnesses",
        [](const CovarianceMatrix& s, const std::string& scenario) {
          return report_dict(evaluate_witnesses(s, parse_scenario(scenario)));
        },
        "state"_a, "scenario"_a = "resonator");
  m.def("witness_sweep",
        [](const FwmParams& p, const CavityParams& c, const std::vector<double>& grid, const std::string& scenario) {
          py::list out;
          for (const auto& r : witness_sweep(p, c, grid, parse_scenario(scenario))) out.append(report_dict(r));
          return out;
        },
        "params"_a, "cavity"_a, "delta_grid_hz"_a, "scenario"_a = "resonator");

  // Reconstruction from the standard measurement set.
  m.def("fit_synthetic",
        [](const CovarianceMatrix& truth, const CavityParams& c, std::size_t points, double sigma, std::uint64_t seed,
           bool sin_phase) {
          const std::vector<double> grid = uniform_grid(-15.0, 15.0, points);
          const std::vector<double> mirrored(grid.rbegin(), grid.rend());
          std::vector<double> phases{0.0};
          if (sin_phase) phases.push_back(M_PI / 2);
          TraceSet ts;
          ts.probe_cavity = ts.conjugate_cavity = c;
          for (Beam b : {Beam::probe, Beam::conjugate}) {
            for (double phi : phases) ts.single.push_back(single_beam_spectrum(truth, b, c, grid, phi));
          }
          for (double a : phases) {
            for (double b : phases) {
              ts.cross.push_back(cross_spectrum_trace(truth, c, c, grid, grid, a, b));
              ts.cross.push_back(cross_spectrum_trace(truth, c, c, grid, mirrored, a, b));
            }
          }
          if (sigma > 0.0) {
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> n(0.0, sigma);
            for (auto& t : ts.single) {
              for (double& v : t.values) v += n(rng);
            }
            for (auto& t : ts.cross) {
              for (double& v : t.values) v += n(rng);
            }
          }
          const FitResult r = fit_covariance(ts);
          return py::dict("covariance"_a = r.covariance, "status"_a = to_string(r.status), "rank"_a = r.rank,
                          "iterations"_a = r.iterations, "residual_rms"_a = r.residual_rms,
                          "condition_estimate"_a = r.condition_estimate,
                          "physicality_adjustment"_a = r.physicality_adjustment);
        },
        "truth"_a, "cavity"_a = CavityParams{}, "points"_a = 201, "noise_sigma"_a = 0.0, "seed"_a = 0,
        "sin_phase"_a = true,
        "Simulate both beams at both demodulation phases plus cross spectra, then fit.");
  m.def("efficiency_correct", &efficiency_correct, "state"_a, "eta"_a);

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          py::gil_scoped_release release;
          const int code = cli::run(args, std::cout, std::cerr);
          std::cout.flush();
          std::cerr.flush();
          return code;
        },
        "args"_a, "Run the command-line front end in-process; returns the exit code.");
}
