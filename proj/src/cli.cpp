#include "twinbeam/cli.hpp"

#include "twinbeam/error.hpp"
#include "twinbeam/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>

namespace twinbeam::cli {

namespace {

namespace fs = std::filesystem;

struct Logger {
  std::ostream& err;
  bool quiet = false;

  template <class... Parts>
  void info(const Parts&... parts) const {
    if (quiet) return;
    err << "twinbeam: ";
    (err << ... << parts);
    err << '\n';
  }
  template <class... Parts>
  void error(const Parts&... parts) const {
    err << "twinbeam: error: ";
    (err << ... << parts);
    err << '\n';
  }
};

struct GlobalOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<double> delta_hz;
  bool quiet = false;
};

struct SimulateOptions {
  bool vacuum = false;
  std::optional<double> noise_sigma;
};

struct FitOptions {
  std::string manifest;
  std::string physicality;
  std::optional<int> max_iterations;
};

struct WitnessOptions {
  std::string state;
  std::string basis;
  std::string bipartition;
  std::string criterion = "all";
  std::string scenario = "resonator";
  bool emulate_homodyne = false;
};

io::RunConfig load_config(const GlobalOptions& global) {
  io::RunConfig config = io::RunConfig::defaults();
  if (!global.config_path.empty()) {
    const fs::path path(global.config_path);
    config = io::run_config_from_json(io::read_text(path), path.string(), path.parent_path());
  }
  if (!global.out_dir.empty()) config.output_dir = global.out_dir;
  if (global.seed) config.seed = *global.seed;
  if (!global.delta_hz.empty()) config.delta_grid_hz = global.delta_hz;
  config.validate();
  return config;
}

std::string delta_dirname(double delta_hz) {
  if (delta_hz == std::round(delta_hz) && std::abs(delta_hz) < 1e15) {
    return "delta_" + std::to_string(static_cast<long long>(delta_hz));
  }
  return "delta_" + io::format_double(delta_hz);
}

const char* phase_name(double phase) { return phase == 0.0 ? "cos" : "sin"; }

int cmd_gain(const io::RunConfig& config, const Logger& log) {
  std::vector<io::GainRow> rows;
  rows.reserve(config.delta_grid_hz.size());
  for (double delta : config.delta_grid_hz) {
    const IntensityGains g = mean_intensity_gain(config.fwm, delta);
    rows.push_back({delta, g.probe, g.conjugate});
  }
  const fs::path path = config.output_dir / "gain.csv";
  io::write_text(path, io::gain_rows_to_csv(rows));
  log.info("wrote ", path.string(), " (", rows.size(), " rows)");
  return exit_ok;
}

int cmd_simulate(const io::RunConfig& config, const SimulateOptions& options, const Logger& log) {
  const double sigma = options.noise_sigma.value_or(config.noise_sigma);
  if (!(sigma >= 0.0)) throw Error(ErrorCode::invalid_argument, "noise sigma must be ≥ 0");
  const bool vacuum = options.vacuum || config.vacuum;
  const std::vector<double> grid =
      uniform_grid(config.trace_grid.start, config.trace_grid.stop, config.trace_grid.count);
  std::vector<double> mirrored(grid.size());
  std::transform(grid.begin(), grid.end(), mirrored.begin(), [](double d) { return -d; });
  const CavityParams& cavity = config.cavity;
  const double phases[] = {0.0, M_PI / 2.0};

  for (std::size_t k = 0; k < config.delta_grid_hz.size(); ++k) {
    const double delta = config.delta_grid_hz[k];
    CovarianceMatrix truth = vacuum_covariance(4);
    if (!vacuum) {
      try {
        truth = synthesize_state(config.fwm, delta, cavity.omega_hz);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::internal) throw;
        std::string spectrum;
        for (double nu : e.diagnostics()) spectrum += " " + io::format_double(nu);
        log.error(e.what(), "; symplectic spectrum:", spectrum);
        return exit_unphysical;
      }
    }
    truth = truth.with_meta(cavity.omega_hz, delta);

    // One stream per δ so output does not depend on how many points are run.
    std::mt19937_64 rng(config.seed + 0x9E3779B97F4A7C15ull * (k + 1));
    std::normal_distribution<double> noise(0.0, sigma > 0.0 ? sigma : 1.0);
    const auto perturb = [&](std::vector<double>& values) {
      if (sigma == 0.0) return;
      for (double& v : values) v += noise(rng);
    };

    const fs::path dir = config.output_dir / delta_dirname(delta);
    io::Manifest manifest;
    manifest.delta_hz = delta;
    manifest.probe_cavity = cavity;
    manifest.conjugate_cavity = cavity;
    for (Beam beam : {Beam::probe, Beam::conjugate}) {
      for (double phase : phases) {
        SpectrumTrace trace = single_beam_spectrum(truth, beam, cavity, grid, phase);
        perturb(trace.values);
        const std::string file = to_string(beam) + "_" + phase_name(phase) + ".csv";
        io::write_text(dir / file, io::trace_to_csv(trace));
        manifest.traces.push_back({file, false, beam, phase, 0.0});
      }
    }
    for (double pp : phases) {
      for (double pc : phases) {
        for (bool mirror : {false, true}) {
          CrossTrace trace = cross_spectrum_trace(truth, cavity, cavity, grid, mirror ? mirrored : grid, pp, pc);
          perturb(trace.values);
          const std::string file = std::string("cross_") + phase_name(pp) + "_" + phase_name(pc) +
                                   (mirror ? "_mirror.csv" : "_co.csv");
          io::write_text(dir / file, io::cross_trace_to_csv(trace));
          manifest.traces.push_back({file, true, Beam::probe, pp, pc});
        }
      }
    }
    io::write_text(dir / "truth.json", io::covariance_to_json(truth));
    manifest.truth = "truth.json";
    io::write_text(dir / "manifest.json", io::manifest_to_json(manifest));
    log.info("wrote ", manifest.traces.size(), " traces for delta=", io::format_double(delta), " Hz to ",
             dir.string());
  }
  return exit_ok;
}

int cmd_fit(const io::RunConfig& config, const FitOptions& options, const Logger& log) {
  FitConfig fit = config.fit;
  if (!options.physicality.empty()) fit.physicality_mode = parse_physicality_mode(options.physicality);
  if (options.max_iterations) fit.max_iterations = *options.max_iterations;
  const fs::path manifest_path(options.manifest);
  io::Manifest manifest;
  const TraceSet traces = io::load_traces(manifest_path, &manifest);
  const FitResult result = fit_covariance(traces, fit);

  std::string extra = "{\"manifest\": \"" + manifest_path.generic_string() + "\"}";
  if (manifest.truth) {
    const fs::path truth_path = manifest_path.parent_path() / *manifest.truth;
    const CovarianceMatrix truth = io::covariance_from_json(io::read_text(truth_path), truth_path.string());
    const CovarianceMatrix ordered = reduce(truth, canonical_modes(Basis::sideband));
    const double error = (result.covariance.matrix() - ordered.matrix()).cwiseAbs().maxCoeff();
    extra = "{\"manifest\": \"" + manifest_path.generic_string() + "\", \"max_entry_error\": " +
            io::format_double(error) + "}";
    log.info("max entry error against truth: ", io::format_double(error));
  }
  const fs::path out = config.output_dir / "fit_result.json";
  io::write_text(out, io::fit_result_to_json(result, extra));
  log.info("fit ", to_string(result.status), " after ", result.iterations, " iterations, rank ", result.rank,
           "/36, residual rms ", io::format_double(result.residual_rms), "; wrote ", out.string());
  switch (result.status) {
    case FitStatus::converged: return exit_ok;
    case FitStatus::underdetermined: return exit_underdetermined;
    case FitStatus::max_iterations: return exit_max_iterations;
  }
  return exit_runtime;
}

int cmd_witness(const io::RunConfig& config, const WitnessOptions& options, const Logger& log) {
  const fs::path path(options.state);
  const CovarianceMatrix state = io::covariance_from_json(io::read_text(path), path.string());
  const Scenario scenario = options.emulate_homodyne ? Scenario::homodyne_emulated : parse_scenario(options.scenario);
  WitnessReport report = evaluate_witnesses(state, scenario);
  if (!options.basis.empty()) {
    const Basis basis = parse_basis(options.basis);
    std::erase_if(report.entries, [&](const BipartitionWitness& e) { return e.basis != basis; });
  }
  if (!options.bipartition.empty()) {
    std::erase_if(report.entries, [&](const BipartitionWitness& e) { return e.label != options.bipartition; });
  }
  if (report.entries.empty()) {
    throw Error(ErrorCode::invalid_argument, "no bipartition of this state matches the --basis/--bipartition filter");
  }
  const std::vector<WitnessReport> reports{report};
  io::write_text(config.output_dir / "witness.json", io::witness_reports_to_json(reports));
  io::write_text(config.output_dir / "witness.csv", io::witness_csv(reports));
  if (!report.physical) log.info("warning: evaluated matrix is not a physical state");
  for (const BipartitionWitness& e : report.entries) {
    std::string line = e.label + " [" + to_string(e.basis) + "]";
    if (options.criterion != "ppt") line += " dgcz=" + io::format_double(e.dgcz);
    if (options.criterion != "dgcz") line += " ppt_nu_min=" + io::format_double(e.ppt_nu_min);
    log.info(line);
  }
  log.info("wrote ", (config.output_dir / "witness.json").string());
  return exit_ok;
}

std::vector<WitnessReport> select(const std::vector<WitnessReport>& reports, Basis basis) {
  std::vector<WitnessReport> out = reports;
  for (WitnessReport& r : out) {
    std::erase_if(r.entries, [&](const BipartitionWitness& e) { return e.basis != basis; });
  }
  return out;
}

int cmd_sweep(const io::RunConfig& config, const Logger& log) {
  const fs::path& dir = config.output_dir;
  for (Scenario scenario : config.scenarios) {
    const std::vector<WitnessReport> reports =
        witness_sweep(config.fwm, config.cavity, config.delta_grid_hz, scenario);
    if (scenario == Scenario::resonator) {
      io::write_text(dir / "fig4_dE.csv", io::energy_csv(reports));
      io::write_text(dir / "fig5_ppt_sa.csv", io::witness_csv(select(reports, Basis::sa)));
      io::write_text(dir / "fig5_ppt_sideband.csv", io::witness_csv(select(reports, Basis::sideband)));
      io::write_text(dir / "fig6_dgcz_sa.csv", io::witness_csv(select(reports, Basis::sa)));
      io::write_text(dir / "fig6_dgcz_sideband.csv", io::witness_csv(select(reports, Basis::sideband)));
    } else {
      io::write_text(dir / "fig5_ppt_sideband_dE0.csv", io::witness_csv(select(reports, Basis::sideband)));
    }
    log.info("swept ", reports.size(), " points (", to_string(scenario), ")");
  }
  log.info("wrote sweep tables to ", dir.string());
  return exit_ok;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::parse: return exit_parse;
    case ErrorCode::io: return exit_io;
    case ErrorCode::insufficient_data: return exit_insufficient_data;
    case ErrorCode::internal: return exit_runtime;
    case ErrorCode::invalid_argument:
    case ErrorCode::invalid_state:
    case ErrorCode::invalid_basis:
    case ErrorCode::plugin_contract: return exit_invalid_argument;
  }
  return exit_runtime;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Twin-beam sideband entanglement simulator and estimator", "twinbeam"};
  app.require_subcommand(1);
  GlobalOptions global;
  app.add_option("--config", global.config_path, "Run configuration JSON")->check(CLI::ExistingFile);
  app.add_option("--out", global.out_dir, "Output directory");
  app.add_option("--seed", global.seed, "Random seed for noisy synthesis");
  app.add_flag("--quiet", global.quiet, "Only log errors");

  CLI::App* gain = app.add_subcommand("gain", "Write the gain profile over the detuning grid");
  CLI::App* simulate = app.add_subcommand("simulate", "Write synthetic traces and the ground-truth state");
  CLI::App* fit = app.add_subcommand("fit", "Reconstruct the covariance matrix from a trace manifest");
  CLI::App* witness = app.add_subcommand("witness", "Evaluate entanglement witnesses on a stored state");
  CLI::App* sweep = app.add_subcommand("sweep", "Witnesses versus detuning for every sweep table");
  for (CLI::App* sub : {gain, simulate, sweep}) {
    sub->add_option("--delta", global.delta_hz, "Two-photon detuning in Hz (repeatable; overrides the grid)");
  }

  SimulateOptions sim;
  simulate->add_flag("--vacuum", sim.vacuum, "Simulate vacuum input");
  simulate->add_option("--noise", sim.noise_sigma, "Additive Gaussian noise, SQL units")
      ->check(CLI::NonNegativeNumber);

  FitOptions fit_options;
  fit->add_option("manifest", fit_options.manifest, "Trace manifest JSON")->required();
  fit->add_option("--physicality", fit_options.physicality, "penalty or project_after")
      ->check(CLI::IsMember({"penalty", "project_after"}));
  fit->add_option("--max-iterations", fit_options.max_iterations)->check(CLI::PositiveNumber);

  WitnessOptions wit;
  witness->add_option("state", wit.state, "Covariance JSON")->required();
  witness->add_option("--basis", wit.basis, "Keep bipartitions of this basis")
      ->check(CLI::IsMember({"sideband", "sa"}));
  witness->add_option("--bipartition", wit.bipartition, "Keep one bipartition (e.g. '+pr|-cj')");
  witness->add_option("--criterion", wit.criterion, "dgcz, ppt or all (logged values)")
      ->check(CLI::IsMember({"dgcz", "ppt", "all"}));
  witness->add_option("--scenario", wit.scenario)->check(CLI::IsMember({"resonator", "homodyne_emulated"}));
  witness->add_flag("--emulate-homodyne", wit.emulate_homodyne, "Drop what homodyne detection cannot see");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "twinbeam: usage error: " << e.what() << "\n" << "run 'twinbeam --help' for usage\n";
    return exit_usage;
  }

  const Logger log{err, global.quiet};
  try {
    const io::RunConfig config = load_config(global);
    if (*gain) return cmd_gain(config, log);
    if (*simulate) return cmd_simulate(config, sim, log);
    if (*fit) return cmd_fit(config, fit_options, log);
    if (*witness) return cmd_witness(config, wit, log);
    if (*sweep) return cmd_sweep(config, log);
  } catch (const Error& e) {
    log.error(e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    log.error(e.what());
    return exit_runtime;
  }
  return exit_usage;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace twinbeam::cli
