#include "twinbeam/reconstruction.hpp"

#include "twinbeam/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace twinbeam {

std::string to_string(PhysicalityMode mode) {
  return mode == PhysicalityMode::penalty ? "penalty" : "project_after";
}

std::string to_string(Initialization init) {
  return init == Initialization::from_plateaus ? "from_plateaus" : "user_supplied";
}

std::string to_string(FitStatus status) {
  switch (status) {
    case FitStatus::converged: return "converged";
    case FitStatus::underdetermined: return "underdetermined";
    case FitStatus::max_iterations: return "max_iterations";
  }
  return "unknown";
}

PhysicalityMode parse_physicality_mode(std::string_view text) {
  if (text == "penalty") return PhysicalityMode::penalty;
  if (text == "project_after") return PhysicalityMode::project_after;
  throw Error(ErrorCode::invalid_argument, "unknown physicality mode '" + std::string(text) + "'");
}

Initialization parse_initialization(std::string_view text) {
  if (text == "from_plateaus") return Initialization::from_plateaus;
  if (text == "user_supplied") return Initialization::user_supplied;
  throw Error(ErrorCode::invalid_argument, "unknown initialization '" + std::string(text) + "'");
}

FitStatus parse_fit_status(std::string_view text) {
  if (text == "converged") return FitStatus::converged;
  if (text == "underdetermined") return FitStatus::underdetermined;
  if (text == "max_iterations") return FitStatus::max_iterations;
  throw Error(ErrorCode::invalid_argument, "unknown fit status '" + std::string(text) + "'");
}

void FitConfig::validate() const {
  if (max_iterations <= 0) throw Error(ErrorCode::invalid_argument, "max_iterations must be positive");
  if (!(gradient_tolerance > 0.0 && parameter_tolerance > 0.0 && rank_tolerance > 0.0 &&
        relative_step > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "fit tolerances must be positive");
  }
  if (!(penalty_weight >= 0.0)) throw Error(ErrorCode::invalid_argument, "negative penalty weight");
  if (initialization == Initialization::user_supplied && !seed_state) {
    throw Error(ErrorCode::invalid_argument, "user_supplied initialization without a seed state");
  }
}

Eigen::VectorXd pack_symmetric(const Eigen::MatrixXd& matrix) {
  Eigen::VectorXd out(36);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < 8; ++i) {
    for (Eigen::Index j = i; j < 8; ++j) out(k++) = matrix(i, j);
  }
  return out;
}

Eigen::MatrixXd unpack_symmetric(const Eigen::VectorXd& entries) {
  Eigen::MatrixXd out(8, 8);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < 8; ++i) {
    for (Eigen::Index j = i; j < 8; ++j) {
      out(i, j) = entries(k);
      out(j, i) = entries(k);
      ++k;
    }
  }
  return out;
}

namespace {

constexpr Eigen::Index kParameters = 36;

std::vector<double> per_mode_efficiency(const TraceSet& traces) {
  const double pr = traces.probe_cavity.eta_det;
  const double cj = traces.conjugate_cavity.eta_det;
  return {pr, pr, cj, cj};
}

Eigen::MatrixXd invert_loss(const Eigen::MatrixXd& measured, std::span<const double> eta) {
  Eigen::VectorXd amplitude(measured.rows());
  for (std::size_t k = 0; k < eta.size(); ++k) {
    if (!(eta[k] > 0.0 && eta[k] <= 1.0)) {
      throw Error(ErrorCode::invalid_argument, "efficiency must lie in (0, 1]");
    }
    amplitude(static_cast<Eigen::Index>(2 * k)) = std::sqrt(eta[k]);
    amplitude(static_cast<Eigen::Index>(2 * k + 1)) = std::sqrt(eta[k]);
  }
  Eigen::MatrixXd shifted = measured;
  shifted.diagonal() -= (Eigen::VectorXd::Ones(measured.rows()) - amplitude.cwiseAbs2());
  const Eigen::VectorXd inverse = amplitude.cwiseInverse();
  return inverse.asDiagonal() * shifted * inverse.asDiagonal();
}

bool is_cos(double phase) { return std::abs(std::remainder(phase, 2.0 * M_PI)) < 1e-9; }
bool is_sin(double phase) { return std::abs(std::remainder(phase - M_PI / 2.0, 2.0 * M_PI)) < 1e-9; }

// One residual row: a measured number and its functional. Rows are sorted
// canonically so the objective does not depend on the order traces arrive in.
struct Row {
  int kind;  // 0 single, 1 cross
  int beam;
  double phase_a;
  double phase_b;
  double detuning_a;
  double detuning_b;
  double value;
  std::size_t trace;  // index into the caller's trace list (single first, then cross)
  LinearFunctional functional;

};

std::vector<Row> build_rows(const TraceSet& traces) {
  std::vector<Row> rows;
  for (std::size_t t = 0; t < traces.single.size(); ++t) {
    const SpectrumTrace& trace = traces.single[t];
    if (trace.detuning.size() != trace.values.size()) {
      throw Error(ErrorCode::invalid_argument, "trace '" + trace.label + "' has ragged columns");
    }
    const CavityParams& cavity = traces.cavity(trace.beam);
    for (std::size_t i = 0; i < trace.values.size(); ++i) {
      rows.push_back({0, static_cast<int>(trace.beam), trace.demod_phase, 0.0, trace.detuning[i], 0.0,
                      trace.values[i], t,
                      single_beam_functional(trace.beam, cavity, trace.detuning[i], trace.demod_phase)});
    }
  }
  for (std::size_t t = 0; t < traces.cross.size(); ++t) {
    const CrossTrace& trace = traces.cross[t];
    if (trace.detuning_probe.size() != trace.values.size() ||
        trace.detuning_conjugate.size() != trace.values.size()) {
      throw Error(ErrorCode::invalid_argument, "cross trace '" + trace.label + "' has ragged columns");
    }
    for (std::size_t i = 0; i < trace.values.size(); ++i) {
      rows.push_back({1, 0, trace.phase_probe, trace.phase_conjugate, trace.detuning_probe[i],
                      trace.detuning_conjugate[i], trace.values[i], traces.single.size() + t,
                      cross_functional(traces.probe_cavity, traces.conjugate_cavity,
                                       trace.detuning_probe[i], trace.detuning_conjugate[i],
                                       trace.phase_probe, trace.phase_conjugate)});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    const auto ka = std::make_tuple(a.kind, a.beam, a.phase_a, a.phase_b, a.detuning_a, a.detuning_b, a.value);
    const auto kb = std::make_tuple(b.kind, b.beam, b.phase_a, b.phase_b, b.detuning_a, b.detuning_b, b.value);
    return ka < kb;
  });
  return rows;
}

// Affine forward model, value_k = a_kᵀ x + b_k over the packed entries x.
struct Model {
  Eigen::MatrixXd design;
  Eigen::VectorXd offset;
  Eigen::VectorXd data;
};

Model assemble_model(const std::vector<Row>& rows) {
  Model model;
  const auto n = static_cast<Eigen::Index>(rows.size());
  model.design.resize(n, kParameters);
  model.offset.resize(n);
  model.data.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const LinearFunctional& f = rows[static_cast<std::size_t>(r)].functional;
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < 8; ++i) {
      for (Eigen::Index j = i; j < 8; ++j) {
        model.design(r, k++) = i == j ? f.left(i) * f.right(i) : f.left(i) * f.right(j) + f.left(j) * f.right(i);
      }
    }
    model.offset(r) = f.offset;
    model.data(r) = rows[static_cast<std::size_t>(r)].value;
  }
  return model;
}

// Physicality penalty ½λ‖N‖²_F, where N = U min(0, E) Uᴴ is the negative part
// of the Hermitian matrix H = V + iΩ. Zero exactly on the physical set, C¹
// across its boundary, and well defined when symplectic eigenvalues coincide
// (every pure state), unlike any single eigenvalue.
struct Penalty {
  double value = 0.0;
  Eigen::VectorXd gradient;  // packed
  Eigen::MatrixXd hessian;   // generalized (Daleckii-Krein) Hessian, packed
};

Eigen::MatrixXcd hermitian_of(const Eigen::MatrixXd& m) {
  return m.cast<std::complex<double>>() +
         std::complex<double>(0.0, 1.0) * symplectic_form(4).cast<std::complex<double>>();
}

double penalty_value(const Eigen::MatrixXd& m, double weight) {
  if (!m.allFinite()) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitian_of(m), Eigen::EigenvaluesOnly);
  return 0.5 * weight * solver.eigenvalues().cwiseMin(0.0).squaredNorm();
}

// d/dx of a packed parameter maps to the symmetric unit matrix E_ij + E_ji.
Eigen::VectorXd pack_gradient(const Eigen::MatrixXd& g) {
  Eigen::VectorXd out(kParameters);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < 8; ++i) {
    for (Eigen::Index j = i; j < 8; ++j) out(k++) = i == j ? g(i, i) : g(i, j) + g(j, i);
  }
  return out;
}

Penalty penalty(const Eigen::MatrixXd& m, double weight) {
  Penalty out{0.0, Eigen::VectorXd::Zero(kParameters), Eigen::MatrixXd::Zero(kParameters, kParameters)};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitian_of(m));
  const Eigen::VectorXd& e = solver.eigenvalues();
  if (e.minCoeff() >= 0.0) return out;
  const Eigen::MatrixXcd& u = solver.eigenvectors();
  const Eigen::VectorXd negative = e.cwiseMin(0.0);
  out.value = 0.5 * weight * negative.squaredNorm();
  const Eigen::MatrixXcd n = u * negative.cast<std::complex<double>>().asDiagonal() * u.adjoint();
  out.gradient = weight * pack_gradient(n.real());

  // Divided differences of f(e) = min(0, e); f' = 1 on the negative side.
  Eigen::MatrixXd divided(8, 8);
  for (Eigen::Index k = 0; k < 8; ++k) {
    for (Eigen::Index l = 0; l < 8; ++l) {
      const double gap = e(k) - e(l);
      divided(k, l) = std::abs(gap) > 1e-12 ? (negative(k) - negative(l)) / gap
                                            : (e(k) + e(l) < 0.0 ? 1.0 : 0.0);
    }
  }
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < 8; ++i) {
    for (Eigen::Index j = i; j < 8; ++j) {
      Eigen::MatrixXcd direction = Eigen::MatrixXcd::Zero(8, 8);
      direction(i, j) = direction(j, i) = 1.0;
      const Eigen::MatrixXcd rotated = u.adjoint() * direction * u;
      const Eigen::MatrixXcd response = u * rotated.cwiseProduct(divided.cast<std::complex<double>>()) * u.adjoint();
      out.hessian.col(col++) = weight * pack_gradient(response.real());
    }
  }
  out.hessian = 0.5 * (out.hessian + out.hessian.transpose()).eval();
  return out;
}

// Quadratic data term plus optional penalty, minimized by a damped Newton
// iteration (Levenberg-Marquardt on the data block, semismooth Newton on the
// penalty).
class Objective {
 public:
  Objective(const Model& model, double penalty_weight)
      : model_(model), weight_(penalty_weight), normal_(model.design.transpose() * model.design) {}

  double cost(const Eigen::VectorXd& x) const {
    const double data = 0.5 * (model_.design * x + model_.offset - model_.data).squaredNorm();
    return weight_ > 0.0 ? data + penalty_value(unpack_symmetric(x), weight_) : data;
  }

  void linearize(const Eigen::VectorXd& x, Eigen::VectorXd& gradient, Eigen::MatrixXd& hessian) const {
    gradient = model_.design.transpose() * (model_.design * x + model_.offset - model_.data);
    hessian = normal_;
    if (weight_ > 0.0) {
      const Penalty p = penalty(unpack_symmetric(x), weight_);
      gradient += p.gradient;
      hessian += p.hessian;
    }
  }

  const Eigen::MatrixXd& normal() const { return normal_; }

 private:
  const Model& model_;
  double weight_;
  Eigen::MatrixXd normal_;
};

struct Descent {
  bool converged = false;
  int iterations = 0;
};

// Relative cost reduction below which an accepted step counts as stagnation.
constexpr double kCostTolerance = 1e-12;

Descent minimize(const Objective& objective, Eigen::VectorXd& x, const FitConfig& config, int budget) {
  Descent out;
  double cost = objective.cost(x);
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
  objective.linearize(x, gradient, hessian);
  // Marquardt scaling from the data block keeps the damping scale-free.
  const Eigen::VectorXd scale =
      objective.normal().diagonal().cwiseMax(1e-12 * objective.normal().diagonal().maxCoeff());
  double damping = 1e-3;
  const auto small = [&](const Eigen::VectorXd& step) {
    return step.norm() <= config.parameter_tolerance * (x.norm() + config.parameter_tolerance);
  };
  for (int it = 0; it < budget; ++it) {
    out.iterations = it + 1;
    if (gradient.lpNorm<Eigen::Infinity>() <= config.gradient_tolerance) {
      out.converged = true;
      break;
    }
    Eigen::MatrixXd damped = hessian;
    damped.diagonal() += damping * scale;
    const Eigen::VectorXd step = damped.ldlt().solve(-gradient);
    const double candidate_cost = objective.cost(x + step);
    if (candidate_cost < cost) {
      const bool done = small(step) || cost - candidate_cost <= kCostTolerance * cost;
      x += step;
      cost = candidate_cost;
      damping = std::max(damping / 3.0, 1e-12);
      objective.linearize(x, gradient, hessian);
      if (done) {
        out.converged = true;
        break;
      }
    } else {
      damping *= 4.0;
      // No descent at any admissible step length: stationary point.
      if (damping > 1e12 || small(step)) {
        out.converged = true;
        break;
      }
    }
  }
  return out;
}

struct Spectrum {
  int rank;
  double condition;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd;
};

Spectrum analyse(const Eigen::MatrixXd& data_jacobian, double tolerance) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(data_jacobian, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > tolerance * s(0)) ++rank;
  }
  const double smallest = s(s.size() - 1);
  const double condition = smallest > 0.0 ? s(0) / smallest : std::numeric_limits<double>::infinity();
  return {rank, condition, std::move(svd)};
}

CovarianceMatrix sideband_state(const Eigen::MatrixXd& m, double omega_hz, double delta_hz) {
  return CovarianceMatrix(Basis::sideband, canonical_modes(Basis::sideband), m, omega_hz, delta_hz,
                          1e-9);
}

// Mean of samples summed in sorted order, so the seed (and therefore the whole
// fit) does not depend on the order traces arrive in.
double ordered_mean(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  double sum = 0.0;
  for (double v : samples) sum += v;
  return sum / static_cast<double>(samples.size());
}

}  // namespace

CovarianceMatrix initialize_from_plateaus(const TraceSet& traces) {
  Eigen::MatrixXd seed = Eigen::MatrixXd::Identity(8, 8);
  for (Beam beam : {Beam::probe, Beam::conjugate}) {
    std::vector<double> far;
    for (const SpectrumTrace& trace : traces.single) {
      if (trace.beam != beam) continue;
      for (std::size_t i = 0; i < trace.values.size() && i < trace.detuning.size(); ++i) {
        if (std::abs(trace.detuning[i]) > plateau_threshold) far.push_back(trace.values[i]);
      }
    }
    if (far.empty()) {
      throw Error(ErrorCode::insufficient_data,
                  "no far-detuned (|Δ| > 10) single-beam points for the " + to_string(beam));
    }
    const Eigen::Index o = beam == Beam::probe ? 0 : 4;
    seed.diagonal().segment<4>(o).setConstant(ordered_mean(std::move(far)));
  }

  // Far detuned, Cos·Cos sees (p₊ + p₋)_pr (p₊ + p₋)_cj / 2 and Sin·Sin sees
  // (q₋ − q₊)_pr (q₋ − q₊)_cj / 2; both are attributed to the twin pairs.
  std::vector<double> pp, qq;
  for (const CrossTrace& trace : traces.cross) {
    const bool cos_cos = is_cos(trace.phase_probe) && is_cos(trace.phase_conjugate);
    const bool sin_sin = is_sin(trace.phase_probe) && is_sin(trace.phase_conjugate);
    if (!cos_cos && !sin_sin) continue;
    for (std::size_t i = 0; i < trace.values.size(); ++i) {
      if (std::abs(trace.detuning_probe[i]) <= plateau_threshold ||
          std::abs(trace.detuning_conjugate[i]) <= plateau_threshold) {
        continue;
      }
      (cos_cos ? pp : qq).push_back(trace.values[i]);
    }
  }
  const double pair_pp = pp.empty() ? 0.0 : ordered_mean(std::move(pp));
  const double pair_qq = qq.empty() ? 0.0 : -ordered_mean(std::move(qq));
  // Pairs: probe +Ω (0) with conjugate −Ω (6), probe −Ω (2) with conjugate +Ω (4).
  for (auto [a, b] : {std::pair<Eigen::Index, Eigen::Index>{0, 6}, {2, 4}}) {
    seed(a, b) = seed(b, a) = pair_pp;
    seed(a + 1, b + 1) = seed(b + 1, a + 1) = pair_qq;
  }
  return sideband_state(seed, traces.probe_cavity.omega_hz, traces.delta_hz);
}

CovarianceMatrix efficiency_correct(const CovarianceMatrix& state, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "efficiency must lie in (0, 1]");
  }
  std::vector<double> per_mode(state.mode_count(), eta);
  return state.with_matrix(invert_loss(state.matrix(), per_mode));
}

FitResult fit_covariance(const TraceSet& traces, const FitConfig& config) {
  config.validate();
  traces.probe_cavity.validate();
  traces.conjugate_cavity.validate();
  const std::vector<double> eta = per_mode_efficiency(traces);

  Eigen::MatrixXd seed;
  if (config.initialization == Initialization::user_supplied) {
    const CovarianceMatrix& s = *config.seed_state;
    if (s.basis() != Basis::sideband || s.mode_count() != 4) {
      throw Error(ErrorCode::invalid_argument, "seed must be a four-mode sideband-basis state");
    }
    seed = reduce(s, canonical_modes(Basis::sideband)).matrix();
  } else {
    seed = invert_loss(initialize_from_plateaus(traces).matrix(), eta);
  }

  const std::vector<Row> rows = build_rows(traces);
  if (rows.empty()) throw Error(ErrorCode::insufficient_data, "no trace points to fit");
  const Model model = assemble_model(rows);
  const Eigen::Index n_data = model.data.size();

  FitResult result{sideband_state(Eigen::MatrixXd::Identity(8, 8), 0.0, 0.0), 0.0, {}, 0, 0.0, 0, 0.0,
                   FitStatus::converged};
  Eigen::VectorXd x = pack_symmetric(seed);
  const Spectrum spectrum = analyse(model.design, config.rank_tolerance);
  result.rank = spectrum.rank;
  result.condition_estimate = spectrum.condition;

  if (spectrum.rank < kParameters) {
    // Minimum-norm correction of the seed on the identifiable subspace; the
    // unidentifiable directions keep their seeded values.
    result.status = FitStatus::underdetermined;
    const Eigen::VectorXd r = model.design * x + model.offset - model.data;
    const Eigen::VectorXd& s = spectrum.svd.singularValues();
    Eigen::VectorXd projected = spectrum.svd.matrixU().transpose() * r;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      projected(i) = i < spectrum.rank ? projected(i) / s(i) : 0.0;
    }
    x -= spectrum.svd.matrixV() * projected;
    result.iterations = 1;
  } else {
    // Data first; the penalty only matters if that optimum leaves the physical set.
    const Objective data_only(model, 0.0);
    Descent stage = minimize(data_only, x, config, config.max_iterations);
    result.iterations = stage.iterations;
    const bool penalize = config.physicality_mode == PhysicalityMode::penalty &&
                          config.penalty_weight > 0.0 && penalty_value(unpack_symmetric(x), 1.0) > 0.0;
    if (penalize && stage.converged && result.iterations < config.max_iterations) {
      const Objective penalized(model, config.penalty_weight);
      stage = minimize(penalized, x, config, config.max_iterations - result.iterations);
      result.iterations += stage.iterations;
    }
    result.status = stage.converged ? FitStatus::converged : FitStatus::max_iterations;
  }

  Regularized physical = add_minimal_isotropic_noise(unpack_symmetric(x));
  result.physicality_adjustment = physical.added_noise;
  result.covariance = sideband_state(physical.matrix, traces.probe_cavity.omega_hz, traces.delta_hz);

  // Residuals are reported for the returned state, per input trace.
  const Eigen::VectorXd final_r =
      model.design * pack_symmetric(result.covariance.matrix()) + model.offset - model.data;
  result.residual_rms = std::sqrt(final_r.squaredNorm() / static_cast<double>(n_data));
  const std::size_t n_traces = traces.single.size() + traces.cross.size();
  std::vector<double> sums(n_traces, 0.0);
  std::vector<std::size_t> counts(n_traces, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    sums[rows[i].trace] += final_r(static_cast<Eigen::Index>(i)) * final_r(static_cast<Eigen::Index>(i));
    ++counts[rows[i].trace];
  }
  for (std::size_t t = 0; t < n_traces; ++t) {
    const std::string& label = t < traces.single.size() ? traces.single[t].label
                                                        : traces.cross[t - traces.single.size()].label;
    result.trace_residuals.push_back(
        {label, counts[t] ? std::sqrt(sums[t] / static_cast<double>(counts[t])) : 0.0});
  }
  return result;
}

Calibration sql_calibrate(const SpectrumTrace& raw, const SpectrumTrace& sql, double band) {
  if (raw.detuning != sql.detuning || raw.values.size() != raw.detuning.size() ||
      sql.values.size() != sql.detuning.size()) {
    throw Error(ErrorCode::invalid_argument, "raw and SQL traces are not on the same grid");
  }
  if (raw.values.empty()) throw Error(ErrorCode::invalid_argument, "empty trace");
  Calibration out;
  out.trace = raw;
  const double mean =
      std::accumulate(sql.values.begin(), sql.values.end(), 0.0) / static_cast<double>(sql.values.size());
  if (!(mean > 0.0)) throw Error(ErrorCode::invalid_argument, "SQL reference is not positive");
  for (std::size_t i = 0; i < raw.values.size(); ++i) {
    if (!(sql.values[i] > 0.0)) throw Error(ErrorCode::invalid_argument, "SQL reference is not positive");
    out.trace.values[i] = raw.values[i] / sql.values[i];
    out.sql_max_deviation = std::max(out.sql_max_deviation, std::abs(sql.values[i] / mean - 1.0));
  }
  if (out.sql_max_deviation > band) {
    out.warning = "calibration-warning: SQL reference deviates by " +
                  std::to_string(100.0 * out.sql_max_deviation) + "% from flat (band " +
                  std::to_string(100.0 * band) + "%)";
  }
  return out;
}

std::vector<Calibration> sql_calibrate(std::span<const SpectrumTrace> raw,
                                       std::span<const SpectrumTrace> sql, double band) {
  if (raw.size() != sql.size()) {
    throw Error(ErrorCode::invalid_argument, "one SQL reference per raw trace is required");
  }
  std::vector<Calibration> out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out.push_back(sql_calibrate(raw[i], sql[i], band));
  return out;
}

}  // namespace twinbeam
