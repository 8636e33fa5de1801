#pragma once

// File formats: JSON for structured objects (covariance, parameters, fit
// results, witness reports, run configuration, trace manifests) and CSV with
// fixed headers for traces and sweep tables. Floats are written with 17
// significant digits so every file reads back bit-exactly.

#include "twinbeam/cavity.hpp"
#include "twinbeam/fwm.hpp"
#include "twinbeam/reconstruction.hpp"
#include "twinbeam/witness.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace twinbeam::io {

namespace fs = std::filesystem;

std::string format_double(double value);
/// Strict decimal parse (whole field must be consumed); nullopt otherwise.
std::optional<double> parse_double(std::string_view text);

std::string read_text(const fs::path& path);
/// Creates parent directories as needed.
void write_text(const fs::path& path, std::string_view text);

// ---- JSON --------------------------------------------------------------

std::string covariance_to_json(const CovarianceMatrix& state);
CovarianceMatrix covariance_from_json(std::string_view text, std::string_view source = "<json>");

std::string fwm_params_to_json(const FwmParams& params);
FwmParams fwm_params_from_json(std::string_view text, std::string_view source = "<json>");

std::string cavity_params_to_json(const CavityParams& params);
CavityParams cavity_params_from_json(std::string_view text, std::string_view source = "<json>");

std::string fit_config_to_json(const FitConfig& config);
FitConfig fit_config_from_json(std::string_view text, std::string_view source = "<json>");

/// `extra` fields (a JSON object, may be empty) are merged into the top level.
std::string fit_result_to_json(const FitResult& result, std::string_view extra = "{}");
FitResult fit_result_from_json(std::string_view text, std::string_view source = "<json>");

std::string witness_reports_to_json(const std::vector<WitnessReport>& reports);
std::vector<WitnessReport> witness_reports_from_json(std::string_view text,
                                                     std::string_view source = "<json>");

struct TraceGrid {
  double start = -15.0;
  double stop = 15.0;
  std::size_t count = 201;
};

struct RunConfig {
  FwmParams fwm = FwmParams::defaults();
  CavityParams cavity;
  std::vector<double> delta_grid_hz;  ///< defaults to 50–75 MHz in 26 steps
  std::vector<Scenario> scenarios{Scenario::resonator, Scenario::homodyne_emulated};
  TraceGrid trace_grid;
  double noise_sigma = 0.0;  ///< additive Gaussian noise on simulated traces, SQL units
  bool vacuum = false;       ///< simulate vacuum input instead of the amplifier state
  FitConfig fit;
  fs::path output_dir = "twinbeam_out";
  std::uint64_t seed = 0;

  void validate() const;
  static RunConfig defaults();
};

std::string run_config_to_json(const RunConfig& config);
/// Relative paths inside the config (gain tables) resolve against `base_dir`.
RunConfig run_config_from_json(std::string_view text, std::string_view source = "<json>",
                               const fs::path& base_dir = {});

struct ManifestEntry {
  fs::path file;
  bool cross = false;
  Beam beam = Beam::probe;  ///< single traces only
  double phase_probe = 0.0;  ///< demodulation phase of single traces
  double phase_conjugate = 0.0;
};

/// Index of a trace directory: files, tags and both cavities.
struct Manifest {
  double delta_hz = 0.0;
  CavityParams probe_cavity;
  CavityParams conjugate_cavity;
  std::vector<ManifestEntry> traces;
  std::optional<fs::path> truth;
};

std::string manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(std::string_view text, std::string_view source = "<json>");

/// Reads every listed trace (paths relative to the manifest's directory).
TraceSet load_traces(const fs::path& manifest_path, Manifest* manifest_out = nullptr);

// ---- CSV ---------------------------------------------------------------

std::string trace_to_csv(const SpectrumTrace& trace);
SpectrumTrace trace_from_csv(std::string_view text, std::string_view source = "<csv>");

std::string cross_trace_to_csv(const CrossTrace& trace);
CrossTrace cross_trace_from_csv(std::string_view text, std::string_view source = "<csv>");

std::string gain_table_to_csv(const GainTable& table);
GainTable gain_table_from_csv(std::string_view text, std::string_view source = "<csv>");

struct GainRow {
  double delta_hz;
  double gain_probe;
  double gain_conjugate;
};
std::string gain_rows_to_csv(const std::vector<GainRow>& rows);
std::vector<GainRow> gain_rows_from_csv(std::string_view text, std::string_view source = "<csv>");

/// One row per (δ, bipartition); dE columns are empty for two-mode reports.
std::string witness_csv(const std::vector<WitnessReport>& reports);
std::vector<WitnessReport> witness_reports_from_csv(std::string_view text,
                                                    std::string_view source = "<csv>");

/// Energy imbalance per beam versus δ.
std::string energy_csv(const std::vector<WitnessReport>& reports);

/// Generic reader used by the tests and the loaders: header + numeric rows.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  ///< source line of each row
};
Table parse_csv(std::string_view text, std::string_view source,
                const std::vector<std::string>& expected_header);

}  // namespace twinbeam::io
