#include "twinbeam/io.hpp"

#include "twinbeam/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace twinbeam::io {

using nlohmann::json;

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value,
                                       std::chars_format::general, 17);
  if (ec != std::errc()) throw Error(ErrorCode::internal, "float formatting failed");
  return std::string(buffer, end);
}

std::optional<double> parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for reading");
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::io, "read failed on '" + path.string() + "'");
  return out.str();
}

void write_text(const fs::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) {
      throw Error(ErrorCode::io, "cannot create '" + path.parent_path().string() + "': " + ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::io, "write failed on '" + path.string() + "'");
}

namespace {

// ---- JSON helpers ----

json parse_json(std::string_view text, std::string_view source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto offset = std::min<std::size_t>(e.byte, text.size());
    const std::size_t line =
        1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
    throw ParseError(std::string(source), line, "malformed JSON");
  }
}

[[noreturn]] void schema_error(std::string_view source, const std::string& what) {
  throw Error(ErrorCode::parse, std::string(source) + ": " + what);
}

const json& field(const json& object, const char* key, std::string_view source) {
  if (!object.is_object()) schema_error(source, "expected a JSON object");
  const auto it = object.find(key);
  if (it == object.end()) schema_error(source, std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& value, const char* key, std::string_view source) {
  if (value.is_number()) return value.get<double>();
  // Non-finite values are written as strings; see dump_number.
  if (value.is_string()) {
    const std::string& s = value.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  schema_error(source, std::string("field '") + key + "' must be a number");
}

double number_field(const json& object, const char* key, std::string_view source) {
  return number(field(object, key, source), key, source);
}

double number_or(const json& object, const char* key, double fallback, std::string_view source) {
  const auto it = object.find(key);
  return it == object.end() ? fallback : number(*it, key, source);
}

std::string string_field(const json& object, const char* key, std::string_view source) {
  const json& value = field(object, key, source);
  if (!value.is_string()) schema_error(source, std::string("field '") + key + "' must be a string");
  return value.get<std::string>();
}

std::vector<double> number_array(const json& value, const char* key, std::string_view source) {
  if (!value.is_array()) schema_error(source, std::string("field '") + key + "' must be an array");
  std::vector<double> out;
  out.reserve(value.size());
  for (const json& item : value) out.push_back(number(item, key, source));
  return out;
}

json dump_number(double value) {
  if (std::isfinite(value)) return value;
  return format_double(value);
}

// Library parse functions throw invalid_argument; within a file that is a parse error.
template <class F>
auto in_file(std::string_view source, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::io) throw;
    schema_error(source, e.what());
  }
}

json covariance_json(const CovarianceMatrix& state) {
  json modes = json::array();
  for (const ModeLabel& m : state.modes()) modes.push_back(to_string(m));
  json matrix = json::array();
  const Eigen::MatrixXd& m = state.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) matrix.push_back(dump_number(m(i, j)));
  }
  return {{"basis", to_string(state.basis())},
          {"mode_order", modes},
          {"omega_hz", dump_number(state.omega_hz())},
          {"delta_hz", dump_number(state.delta_hz())},
          {"matrix", matrix}};
}

CovarianceMatrix covariance_of(const json& j, std::string_view source) {
  return in_file(source, [&] {
    const Basis basis = parse_basis(string_field(j, "basis", source));
    const json& order = field(j, "mode_order", source);
    if (!order.is_array()) schema_error(source, "'mode_order' must be an array");
    std::vector<ModeLabel> modes;
    for (const json& m : order) {
      if (!m.is_string()) schema_error(source, "mode labels must be strings");
      modes.push_back(parse_mode_label(m.get<std::string>()));
    }
    const std::vector<double> flat = number_array(field(j, "matrix", source), "matrix", source);
    const auto n = static_cast<Eigen::Index>(2 * modes.size());
    if (flat.size() != static_cast<std::size_t>(n * n)) {
      schema_error(source, "'matrix' has " + std::to_string(flat.size()) + " entries, expected " +
                               std::to_string(n * n));
    }
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < n; ++k) m(i, k) = flat[static_cast<std::size_t>(i * n + k)];
    }
    return CovarianceMatrix(basis, std::move(modes), std::move(m), number_or(j, "omega_hz", 0.0, source),
                            number_or(j, "delta_hz", 0.0, source));
  });
}

json gain_table_json(const GainTable& table) {
  return {{"delta_hz", table.delta_hz()}, {"gain", table.gain()}};
}

json fwm_json(const FwmParams& p) {
  json j = {{"delta_max_hz", p.delta_max_hz},
            {"g_max", p.g_max},
            {"width_hz", p.width_hz},
            {"phase_slope_rad_per_hz", p.phase_slope_rad_per_hz},
            {"loss_eta_medium", p.loss_eta_medium}};
  if (p.table) j["gain_table"] = gain_table_json(*p.table);
  return j;
}

FwmParams fwm_of(const json& j, std::string_view source, const fs::path& base_dir) {
  return in_file(source, [&] {
    if (!j.is_object()) schema_error(source, "FWM parameters must be an object");
    const FwmParams d = FwmParams::defaults();
    FwmParams p;
    p.delta_max_hz = number_or(j, "delta_max_hz", d.delta_max_hz, source);
    p.g_max = number_or(j, "g_max", d.g_max, source);
    p.width_hz = number_or(j, "width_hz", d.width_hz, source);
    p.phase_slope_rad_per_hz = number_or(j, "phase_slope_rad_per_hz", d.phase_slope_rad_per_hz, source);
    p.loss_eta_medium = number_or(j, "loss_eta_medium", d.loss_eta_medium, source);
    if (const auto it = j.find("gain_table"); it != j.end()) {
      p.table = GainTable(number_array(field(*it, "delta_hz", source), "delta_hz", source),
                          number_array(field(*it, "gain", source), "gain", source));
    }
    if (const auto it = j.find("gain_table_csv"); it != j.end()) {
      if (!it->is_string()) schema_error(source, "'gain_table_csv' must be a path");
      const fs::path path = base_dir / it->get<std::string>();
      p.table = gain_table_from_csv(read_text(path), path.string());
    }
    p.validate();
    return p;
  });
}

json cavity_json(const CavityParams& c) {
  return {{"gamma_hz", c.gamma_hz},
          {"finesse", c.finesse},
          {"r0_power", c.r0_power},
          {"omega_hz", c.omega_hz},
          {"eta_det", c.eta_det}};
}

CavityParams cavity_of(const json& j, std::string_view source) {
  return in_file(source, [&] {
    if (!j.is_object()) schema_error(source, "cavity parameters must be an object");
    const CavityParams d;
    CavityParams c;
    c.gamma_hz = number_or(j, "gamma_hz", d.gamma_hz, source);
    c.finesse = number_or(j, "finesse", d.finesse, source);
    c.r0_power = number_or(j, "r0_power", d.r0_power, source);
    c.omega_hz = number_or(j, "omega_hz", d.omega_hz, source);
    c.eta_det = number_or(j, "eta_det", d.eta_det, source);
    c.validate();
    return c;
  });
}

json fit_config_json(const FitConfig& c) {
  json j = {{"max_iterations", c.max_iterations},
            {"gradient_tolerance", c.gradient_tolerance},
            {"parameter_tolerance", c.parameter_tolerance},
            {"physicality_mode", to_string(c.physicality_mode)},
            {"penalty_weight", c.penalty_weight},
            {"initialization", to_string(c.initialization)},
            {"rank_tolerance", c.rank_tolerance},
            {"relative_step", c.relative_step}};
  if (c.seed_state) j["seed_state"] = covariance_json(*c.seed_state);
  return j;
}

FitConfig fit_config_of(const json& j, std::string_view source) {
  return in_file(source, [&] {
    if (!j.is_object()) schema_error(source, "fit configuration must be an object");
    FitConfig c;
    if (const auto it = j.find("max_iterations"); it != j.end()) {
      if (!it->is_number_integer()) schema_error(source, "'max_iterations' must be an integer");
      c.max_iterations = it->get<int>();
    }
    c.gradient_tolerance = number_or(j, "gradient_tolerance", c.gradient_tolerance, source);
    c.parameter_tolerance = number_or(j, "parameter_tolerance", c.parameter_tolerance, source);
    c.penalty_weight = number_or(j, "penalty_weight", c.penalty_weight, source);
    c.rank_tolerance = number_or(j, "rank_tolerance", c.rank_tolerance, source);
    c.relative_step = number_or(j, "relative_step", c.relative_step, source);
    if (j.contains("physicality_mode")) {
      c.physicality_mode = parse_physicality_mode(string_field(j, "physicality_mode", source));
    }
    if (j.contains("initialization")) {
      c.initialization = parse_initialization(string_field(j, "initialization", source));
    }
    if (const auto it = j.find("seed_state"); it != j.end()) c.seed_state = covariance_of(*it, source);
    c.validate();
    return c;
  });
}

json witness_json(const WitnessReport& r) {
  json entries = json::array();
  for (const BipartitionWitness& e : r.entries) {
    entries.push_back({{"bipartition", e.label},
                       {"basis", to_string(e.basis)},
                       {"dgcz", dump_number(e.dgcz)},
                       {"ppt_nu_min", dump_number(e.ppt_nu_min)}});
  }
  json j = {{"delta_hz", dump_number(r.delta_hz)},
            {"scenario", to_string(r.scenario)},
            {"physical", r.physical},
            {"entries", entries}};
  j["dE_probe"] = r.delta_e_probe ? dump_number(*r.delta_e_probe) : json(nullptr);
  j["dE_conj"] = r.delta_e_conjugate ? dump_number(*r.delta_e_conjugate) : json(nullptr);
  return j;
}

WitnessReport witness_of(const json& j, std::string_view source) {
  return in_file(source, [&] {
    WitnessReport r;
    r.delta_hz = number_field(j, "delta_hz", source);
    r.scenario = parse_scenario(string_field(j, "scenario", source));
    const json& physical = field(j, "physical", source);
    if (!physical.is_boolean()) schema_error(source, "'physical' must be a boolean");
    r.physical = physical.get<bool>();
    if (const auto it = j.find("dE_probe"); it != j.end() && !it->is_null()) {
      r.delta_e_probe = number(*it, "dE_probe", source);
    }
    if (const auto it = j.find("dE_conj"); it != j.end() && !it->is_null()) {
      r.delta_e_conjugate = number(*it, "dE_conj", source);
    }
    const json& entries = field(j, "entries", source);
    if (!entries.is_array()) schema_error(source, "'entries' must be an array");
    for (const json& e : entries) {
      r.entries.push_back({string_field(e, "bipartition", source),
                           parse_basis(string_field(e, "basis", source)),
                           number_field(e, "dgcz", source), number_field(e, "ppt_nu_min", source)});
    }
    return r;
  });
}

fs::path path_field(const json& j, const char* key, std::string_view source) {
  return fs::path(string_field(j, key, source));
}

}  // namespace

std::string covariance_to_json(const CovarianceMatrix& state) {
  return covariance_json(state).dump(2) + "\n";
}

CovarianceMatrix covariance_from_json(std::string_view text, std::string_view source) {
  return covariance_of(parse_json(text, source), source);
}

std::string fwm_params_to_json(const FwmParams& params) { return fwm_json(params).dump(2) + "\n"; }

FwmParams fwm_params_from_json(std::string_view text, std::string_view source) {
  return fwm_of(parse_json(text, source), source, {});
}

std::string cavity_params_to_json(const CavityParams& params) {
  return cavity_json(params).dump(2) + "\n";
}

CavityParams cavity_params_from_json(std::string_view text, std::string_view source) {
  return cavity_of(parse_json(text, source), source);
}

std::string fit_config_to_json(const FitConfig& config) {
  return fit_config_json(config).dump(2) + "\n";
}

FitConfig fit_config_from_json(std::string_view text, std::string_view source) {
  return fit_config_of(parse_json(text, source), source);
}

std::string fit_result_to_json(const FitResult& result, std::string_view extra) {
  json residuals = json::array();
  for (const TraceResidual& t : result.trace_residuals) {
    residuals.push_back({{"label", t.label}, {"rms", dump_number(t.rms)}});
  }
  json j = {{"covariance", covariance_json(result.covariance)},
            {"residual_rms", dump_number(result.residual_rms)},
            {"trace_residuals", residuals},
            {"iterations", result.iterations},
            {"condition_estimate", dump_number(result.condition_estimate)},
            {"rank", result.rank},
            {"physicality_adjustment", dump_number(result.physicality_adjustment)},
            {"status", to_string(result.status)}};
  const json more = parse_json(extra, "<extra>");
  if (!more.is_object()) throw Error(ErrorCode::invalid_argument, "extra fit-result fields must be an object");
  for (const auto& [key, value] : more.items()) j[key] = value;
  return j.dump(2) + "\n";
}

FitResult fit_result_from_json(std::string_view text, std::string_view source) {
  const json j = parse_json(text, source);
  return in_file(source, [&] {
    FitResult r{covariance_of(field(j, "covariance", source), source),
                number_field(j, "residual_rms", source),
                {},
                static_cast<int>(number_field(j, "iterations", source)),
                number_field(j, "condition_estimate", source),
                static_cast<int>(number_field(j, "rank", source)),
                number_field(j, "physicality_adjustment", source),
                parse_fit_status(string_field(j, "status", source))};
    const json& residuals = field(j, "trace_residuals", source);
    if (!residuals.is_array()) schema_error(source, "'trace_residuals' must be an array");
    for (const json& t : residuals) {
      r.trace_residuals.push_back({string_field(t, "label", source), number_field(t, "rms", source)});
    }
    return r;
  });
}

std::string witness_reports_to_json(const std::vector<WitnessReport>& reports) {
  json out = json::array();
  for (const WitnessReport& r : reports) out.push_back(witness_json(r));
  return out.dump(2) + "\n";
}

std::vector<WitnessReport> witness_reports_from_json(std::string_view text, std::string_view source) {
  const json j = parse_json(text, source);
  if (!j.is_array()) schema_error(source, "expected an array of witness reports");
  std::vector<WitnessReport> out;
  for (const json& r : j) out.push_back(witness_of(r, source));
  return out;
}

// ---- run configuration ----

void RunConfig::validate() const {
  fwm.validate();
  cavity.validate();
  if (delta_grid_hz.empty()) throw Error(ErrorCode::invalid_argument, "empty detuning grid");
  for (double d : delta_grid_hz) {
    if (!std::isfinite(d)) throw Error(ErrorCode::invalid_argument, "non-finite detuning in grid");
  }
  if (scenarios.empty()) throw Error(ErrorCode::invalid_argument, "no scenario selected");
  if (trace_grid.count < 2 || !(trace_grid.stop > trace_grid.start)) {
    throw Error(ErrorCode::invalid_argument, "trace grid needs count ≥ 2 and stop > start");
  }
  if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::invalid_argument, "noise sigma must be ≥ 0");
  if (output_dir.empty()) throw Error(ErrorCode::invalid_argument, "empty output directory");
  fit.validate();
}

RunConfig RunConfig::defaults() {
  RunConfig config;
  for (int i = 0; i <= 25; ++i) config.delta_grid_hz.push_back(50e6 + 1e6 * i);
  return config;
}

std::string run_config_to_json(const RunConfig& c) {
  json scenarios = json::array();
  for (Scenario s : c.scenarios) scenarios.push_back(to_string(s));
  json j = {{"fwm", fwm_json(c.fwm)},
            {"cavity", cavity_json(c.cavity)},
            {"delta_grid_hz", c.delta_grid_hz},
            {"scenarios", scenarios},
            {"trace_grid", {{"start", c.trace_grid.start}, {"stop", c.trace_grid.stop}, {"count", c.trace_grid.count}}},
            {"noise_sigma", c.noise_sigma},
            {"vacuum", c.vacuum},
            {"fit", fit_config_json(c.fit)},
            {"output_dir", c.output_dir.string()},
            {"seed", c.seed}};
  return j.dump(2) + "\n";
}

RunConfig run_config_from_json(std::string_view text, std::string_view source, const fs::path& base_dir) {
  const json j = parse_json(text, source);
  if (!j.is_object()) schema_error(source, "run configuration must be an object");
  RunConfig c = RunConfig::defaults();
  return in_file(source, [&] {
    if (const auto it = j.find("fwm"); it != j.end()) c.fwm = fwm_of(*it, source, base_dir);
    if (const auto it = j.find("cavity"); it != j.end()) c.cavity = cavity_of(*it, source);
    if (const auto it = j.find("delta_grid_hz"); it != j.end()) {
      if (it->is_object()) {
        const double start = number_field(*it, "start", source);
        const double stop = number_field(*it, "stop", source);
        const double count = number_field(*it, "count", source);
        if (!(count >= 1.0) || count != std::floor(count)) schema_error(source, "grid count must be a positive integer");
        c.delta_grid_hz = count == 1.0 ? std::vector<double>{start}
                                       : uniform_grid(start, stop, static_cast<std::size_t>(count));
      } else {
        c.delta_grid_hz = number_array(*it, "delta_grid_hz", source);
      }
    }
    if (const auto it = j.find("scenarios"); it != j.end()) {
      if (!it->is_array()) schema_error(source, "'scenarios' must be an array");
      c.scenarios.clear();
      for (const json& s : *it) {
        if (!s.is_string()) schema_error(source, "scenario names must be strings");
        c.scenarios.push_back(parse_scenario(s.get<std::string>()));
      }
    }
    if (const auto it = j.find("trace_grid"); it != j.end()) {
      c.trace_grid.start = number_or(*it, "start", c.trace_grid.start, source);
      c.trace_grid.stop = number_or(*it, "stop", c.trace_grid.stop, source);
      const double count = number_or(*it, "count", static_cast<double>(c.trace_grid.count), source);
      if (!(count >= 0.0) || count != std::floor(count)) schema_error(source, "trace grid count must be an integer");
      c.trace_grid.count = static_cast<std::size_t>(count);
    }
    c.noise_sigma = number_or(j, "noise_sigma", c.noise_sigma, source);
    if (const auto it = j.find("vacuum"); it != j.end()) {
      if (!it->is_boolean()) schema_error(source, "'vacuum' must be a boolean");
      c.vacuum = it->get<bool>();
    }
    if (const auto it = j.find("fit"); it != j.end()) c.fit = fit_config_of(*it, source);
    if (const auto it = j.find("output_dir"); it != j.end()) c.output_dir = path_field(j, "output_dir", source);
    if (const auto it = j.find("seed"); it != j.end()) {
      if (!it->is_number_unsigned()) schema_error(source, "'seed' must be a non-negative integer");
      c.seed = it->get<std::uint64_t>();
    }
    c.validate();
    return c;
  });
}

// ---- manifest ----

std::string manifest_to_json(const Manifest& m) {
  json traces = json::array();
  for (const ManifestEntry& e : m.traces) {
    json t = {{"file", e.file.generic_string()}, {"kind", e.cross ? "cross" : "single"}};
    if (e.cross) {
      t["phase_probe_rad"] = e.phase_probe;
      t["phase_conjugate_rad"] = e.phase_conjugate;
    } else {
      t["beam"] = to_string(e.beam);
      t["demod_phase_rad"] = e.phase_probe;
    }
    traces.push_back(t);
  }
  json j = {{"delta_hz", m.delta_hz},
            {"probe_cavity", cavity_json(m.probe_cavity)},
            {"conjugate_cavity", cavity_json(m.conjugate_cavity)},
            {"traces", traces}};
  if (m.truth) j["truth"] = m.truth->generic_string();
  return j.dump(2) + "\n";
}

Manifest manifest_from_json(std::string_view text, std::string_view source) {
  const json j = parse_json(text, source);
  return in_file(source, [&] {
    Manifest m;
    m.delta_hz = number_or(j, "delta_hz", 0.0, source);
    m.probe_cavity = cavity_of(field(j, "probe_cavity", source), source);
    m.conjugate_cavity = cavity_of(field(j, "conjugate_cavity", source), source);
    const json& traces = field(j, "traces", source);
    if (!traces.is_array()) schema_error(source, "'traces' must be an array");
    for (const json& t : traces) {
      ManifestEntry e;
      e.file = path_field(t, "file", source);
      const std::string kind = string_field(t, "kind", source);
      if (kind == "cross") {
        e.cross = true;
        e.phase_probe = number_field(t, "phase_probe_rad", source);
        e.phase_conjugate = number_field(t, "phase_conjugate_rad", source);
      } else if (kind == "single") {
        e.beam = parse_beam(string_field(t, "beam", source));
        e.phase_probe = number_field(t, "demod_phase_rad", source);
      } else {
        schema_error(source, "trace kind must be 'single' or 'cross', got '" + kind + "'");
      }
      m.traces.push_back(std::move(e));
    }
    if (j.contains("truth")) m.truth = path_field(j, "truth", source);
    return m;
  });
}

TraceSet load_traces(const fs::path& manifest_path, Manifest* manifest_out) {
  const Manifest manifest = manifest_from_json(read_text(manifest_path), manifest_path.string());
  const fs::path dir = manifest_path.parent_path();
  TraceSet set;
  set.probe_cavity = manifest.probe_cavity;
  set.conjugate_cavity = manifest.conjugate_cavity;
  set.delta_hz = manifest.delta_hz;
  for (const ManifestEntry& e : manifest.traces) {
    const fs::path path = dir / e.file;
    const std::string text = read_text(path);
    if (e.cross) {
      CrossTrace trace = cross_trace_from_csv(text, path.string());
      if (trace.phase_probe != e.phase_probe || trace.phase_conjugate != e.phase_conjugate) {
        schema_error(path.string(), "demodulation phases disagree with the manifest");
      }
      set.cross.push_back(std::move(trace));
    } else {
      SpectrumTrace trace = trace_from_csv(text, path.string());
      if (trace.beam != e.beam || trace.demod_phase != e.phase_probe) {
        schema_error(path.string(), "beam or demodulation phase disagrees with the manifest");
      }
      set.single.push_back(std::move(trace));
    }
  }
  if (manifest_out) *manifest_out = manifest;
  return set;
}

// ---- CSV ----

Table parse_csv(std::string_view text, std::string_view source,
                const std::vector<std::string>& expected_header) {
  Table table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  const std::string src(source);
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      cells.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (table.header.empty()) {
      if (cells != expected_header) {
        std::string want;
        for (const std::string& h : expected_header) want += (want.empty() ? "" : ",") + h;
        throw ParseError(src, line_no, "expected header '" + want + "'");
      }
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw ParseError(src, line_no, "expected " + std::to_string(table.header.size()) + " fields, got " +
                                         std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
    table.lines.push_back(line_no);
  }
  if (table.header.empty()) throw ParseError(src, std::max<std::size_t>(line_no, 1), "missing header");
  return table;
}

namespace {

double cell_number(const Table& t, std::size_t row, std::size_t col, std::string_view source) {
  const auto value = parse_double(t.rows[row][col]);
  if (!value) {
    throw ParseError(std::string(source), t.lines[row],
                     "field '" + t.header[col] + "' is not a number: '" + t.rows[row][col] + "'");
  }
  return *value;
}

std::optional<double> optional_cell(const Table& t, std::size_t row, std::size_t col, std::string_view source) {
  if (t.rows[row][col].empty()) return std::nullopt;
  return cell_number(t, row, col, source);
}

std::string stem_of(std::string_view source) {
  return fs::path(std::string(source)).stem().string();
}

void require_rows(const Table& t, std::string_view source) {
  if (t.rows.empty()) throw ParseError(std::string(source), 1, "no data rows");
}

const std::vector<std::string> kTraceHeader{"delta_norm", "value", "demod_phase_rad", "beam"};
const std::vector<std::string> kCrossHeader{"delta_norm_probe", "delta_norm_conjugate", "value",
                                            "phase_probe_rad", "phase_conjugate_rad"};
const std::vector<std::string> kGainTableHeader{"delta_hz", "gain"};
const std::vector<std::string> kGainHeader{"delta_hz", "gain_probe", "gain_conjugate"};
const std::vector<std::string> kWitnessHeader{"delta_hz", "bipartition", "basis", "scenario",
                                              "dgcz", "ppt_nu_min", "dE_probe", "dE_conj"};

std::string join_header(const std::vector<std::string>& header) {
  std::string out;
  for (const std::string& h : header) out += (out.empty() ? "" : ",") + h;
  return out + "\n";
}

std::string optional_number(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

std::string trace_to_csv(const SpectrumTrace& trace) {
  if (trace.detuning.size() != trace.values.size()) {
    throw Error(ErrorCode::invalid_argument, "trace columns differ in length");
  }
  std::string out = join_header(kTraceHeader);
  const std::string phase = format_double(trace.demod_phase);
  const std::string beam = to_string(trace.beam);
  for (std::size_t i = 0; i < trace.values.size(); ++i) {
    out += format_double(trace.detuning[i]) + "," + format_double(trace.values[i]) + "," + phase + "," + beam + "\n";
  }
  return out;
}

SpectrumTrace trace_from_csv(std::string_view text, std::string_view source) {
  const Table t = parse_csv(text, source, kTraceHeader);
  require_rows(t, source);
  SpectrumTrace trace;
  trace.label = stem_of(source);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double delta = cell_number(t, r, 0, source);
    const double phase = cell_number(t, r, 2, source);
    Beam beam;
    try {
      beam = parse_beam(t.rows[r][3]);
    } catch (const Error&) {
      throw ParseError(std::string(source), t.lines[r], "unknown beam '" + t.rows[r][3] + "'");
    }
    if (r == 0) {
      trace.demod_phase = phase;
      trace.beam = beam;
    } else if (phase != trace.demod_phase || beam != trace.beam) {
      throw ParseError(std::string(source), t.lines[r], "one beam and one demodulation phase per file");
    } else if (!(delta > trace.detuning.back())) {
      throw ParseError(std::string(source), t.lines[r], "delta_norm must be strictly ascending");
    }
    trace.detuning.push_back(delta);
    trace.values.push_back(cell_number(t, r, 1, source));
  }
  return trace;
}

std::string cross_trace_to_csv(const CrossTrace& trace) {
  if (trace.detuning_probe.size() != trace.values.size() ||
      trace.detuning_conjugate.size() != trace.values.size()) {
    throw Error(ErrorCode::invalid_argument, "cross-trace columns differ in length");
  }
  std::string out = join_header(kCrossHeader);
  const std::string phases = format_double(trace.phase_probe) + "," + format_double(trace.phase_conjugate);
  for (std::size_t i = 0; i < trace.values.size(); ++i) {
    out += format_double(trace.detuning_probe[i]) + "," + format_double(trace.detuning_conjugate[i]) + "," +
           format_double(trace.values[i]) + "," + phases + "\n";
  }
  return out;
}

CrossTrace cross_trace_from_csv(std::string_view text, std::string_view source) {
  const Table t = parse_csv(text, source, kCrossHeader);
  require_rows(t, source);
  CrossTrace trace;
  trace.label = stem_of(source);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double pp = cell_number(t, r, 3, source);
    const double pc = cell_number(t, r, 4, source);
    if (r == 0) {
      trace.phase_probe = pp;
      trace.phase_conjugate = pc;
    } else if (pp != trace.phase_probe || pc != trace.phase_conjugate) {
      throw ParseError(std::string(source), t.lines[r], "one phase pair per cross-trace file");
    }
    trace.detuning_probe.push_back(cell_number(t, r, 0, source));
    trace.detuning_conjugate.push_back(cell_number(t, r, 1, source));
    trace.values.push_back(cell_number(t, r, 2, source));
  }
  return trace;
}

std::string gain_table_to_csv(const GainTable& table) {
  std::string out = join_header(kGainTableHeader);
  for (std::size_t i = 0; i < table.delta_hz().size(); ++i) {
    out += format_double(table.delta_hz()[i]) + "," + format_double(table.gain()[i]) + "\n";
  }
  return out;
}

GainTable gain_table_from_csv(std::string_view text, std::string_view source) {
  const Table t = parse_csv(text, source, kGainTableHeader);
  require_rows(t, source);
  std::vector<double> delta, gain;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    delta.push_back(cell_number(t, r, 0, source));
    gain.push_back(cell_number(t, r, 1, source));
  }
  try {
    return GainTable(std::move(delta), std::move(gain));
  } catch (const Error& e) {
    schema_error(source, e.what());
  }
}

std::string gain_rows_to_csv(const std::vector<GainRow>& rows) {
  std::string out = join_header(kGainHeader);
  for (const GainRow& r : rows) {
    out += format_double(r.delta_hz) + "," + format_double(r.gain_probe) + "," + format_double(r.gain_conjugate) + "\n";
  }
  return out;
}

std::vector<GainRow> gain_rows_from_csv(std::string_view text, std::string_view source) {
  const Table t = parse_csv(text, source, kGainHeader);
  std::vector<GainRow> rows;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    rows.push_back({cell_number(t, r, 0, source), cell_number(t, r, 1, source), cell_number(t, r, 2, source)});
  }
  return rows;
}

std::string witness_csv(const std::vector<WitnessReport>& reports) {
  std::string out = join_header(kWitnessHeader);
  for (const WitnessReport& r : reports) {
    for (const BipartitionWitness& e : r.entries) {
      out += format_double(r.delta_hz) + "," + e.label + "," + to_string(e.basis) + "," + to_string(r.scenario) +
             "," + format_double(e.dgcz) + "," + format_double(e.ppt_nu_min) + "," +
             optional_number(r.delta_e_probe) + "," + optional_number(r.delta_e_conjugate) + "\n";
    }
  }
  return out;
}

std::vector<WitnessReport> witness_reports_from_csv(std::string_view text, std::string_view source) {
  const Table t = parse_csv(text, source, kWitnessHeader);
  std::vector<WitnessReport> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double delta = cell_number(t, r, 0, source);
    Scenario scenario;
    Basis basis;
    try {
      scenario = parse_scenario(t.rows[r][3]);
      basis = parse_basis(t.rows[r][2]);
    } catch (const Error& e) {
      throw ParseError(std::string(source), t.lines[r], e.what());
    }
    // Consecutive rows with the same δ and scenario belong to one report.
    if (out.empty() || out.back().delta_hz != delta || out.back().scenario != scenario) {
      WitnessReport report;
      report.delta_hz = delta;
      report.scenario = scenario;
      report.delta_e_probe = optional_cell(t, r, 6, source);
      report.delta_e_conjugate = optional_cell(t, r, 7, source);
      out.push_back(std::move(report));
    }
    out.back().entries.push_back({t.rows[r][1], basis, cell_number(t, r, 4, source), cell_number(t, r, 5, source)});
  }
  return out;
}

std::string energy_csv(const std::vector<WitnessReport>& reports) {
  std::string out = "delta_hz,dE_probe,dE_conj\n";
  for (const WitnessReport& r : reports) {
    out += format_double(r.delta_hz) + "," + optional_number(r.delta_e_probe) + "," +
           optional_number(r.delta_e_conjugate) + "\n";
  }
  return out;
}

}  // namespace twinbeam::io
