#include "twinbeam/gaussian.hpp"

#include "twinbeam/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>

namespace twinbeam {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::invalid_state: return "invalid-state";
    case ErrorCode::invalid_basis: return "invalid-basis";
    case ErrorCode::internal: return "internal-error";
    case ErrorCode::plugin_contract: return "plugin-contract-error";
    case ErrorCode::insufficient_data: return "insufficient-data";
    case ErrorCode::parse: return "parse-error";
    case ErrorCode::io: return "io-error";
  }
  return "unknown-error";
}

std::string to_string(Beam beam) { return beam == Beam::probe ? "probe" : "conjugate"; }

std::string to_string(Basis basis) { return basis == Basis::sideband ? "sideband" : "sa"; }

std::string to_string(ModeLabel label) {
  std::string out = to_string(label.beam);
  switch (label.component) {
    case Component::upper: return out + "_upper";
    case Component::lower: return out + "_lower";
    case Component::symmetric: return out + "_S";
    case Component::antisymmetric: return out + "_A";
  }
  return out;
}

Beam parse_beam(std::string_view text) {
  if (text == "probe") return Beam::probe;
  if (text == "conjugate") return Beam::conjugate;
  throw Error(ErrorCode::invalid_argument, "unknown beam '" + std::string(text) + "'");
}

Basis parse_basis(std::string_view text) {
  if (text == "sideband") return Basis::sideband;
  if (text == "sa") return Basis::sa;
  throw Error(ErrorCode::invalid_argument, "unknown basis '" + std::string(text) + "'");
}

ModeLabel parse_mode_label(std::string_view text) {
  for (Basis basis : {Basis::sideband, Basis::sa}) {
    for (const ModeLabel& label : canonical_modes(basis)) {
      if (to_string(label) == text) return label;
    }
  }
  throw Error(ErrorCode::invalid_argument, "unknown mode label '" + std::string(text) + "'");
}

Basis basis_of(Component component) {
  return (component == Component::upper || component == Component::lower) ? Basis::sideband
                                                                          : Basis::sa;
}

Beam other(Beam beam) { return beam == Beam::probe ? Beam::conjugate : Beam::probe; }

const std::vector<ModeLabel>& canonical_modes(Basis basis) {
  static const std::vector<ModeLabel> sideband{modes::probe_upper, modes::probe_lower,
                                               modes::conjugate_upper, modes::conjugate_lower};
  static const std::vector<ModeLabel> sa{modes::probe_symmetric, modes::probe_antisymmetric,
                                         modes::conjugate_symmetric,
                                         modes::conjugate_antisymmetric};
  return basis == Basis::sideband ? sideband : sa;
}

namespace {

double asymmetry(const Eigen::MatrixXd& m) { return (m - m.transpose()).cwiseAbs().maxCoeff(); }

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

CovarianceMatrix::CovarianceMatrix(Basis basis, std::vector<ModeLabel> modes,
                                   Eigen::MatrixXd matrix, double omega_hz, double delta_hz,
                                   double symmetry_tolerance)
    : basis_(basis),
      modes_(std::move(modes)),
      matrix_(std::move(matrix)),
      omega_hz_(omega_hz),
      delta_hz_(delta_hz) {
  const auto dim = static_cast<Eigen::Index>(2 * modes_.size());
  if (modes_.empty()) throw Error(ErrorCode::invalid_state, "covariance matrix without modes");
  if (matrix_.rows() != dim || matrix_.cols() != dim) {
    throw Error(ErrorCode::invalid_state,
                "matrix is " + std::to_string(matrix_.rows()) + "x" +
                    std::to_string(matrix_.cols()) + " but mode list implies " +
                    std::to_string(dim) + "x" + std::to_string(dim));
  }
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    if (basis_of(modes_[i].component) != basis_) {
      throw Error(ErrorCode::invalid_state,
                  "mode " + to_string(modes_[i]) + " does not belong to basis " + to_string(basis_));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (modes_[i] == modes_[j]) {
        throw Error(ErrorCode::invalid_state, "duplicate mode " + to_string(modes_[i]));
      }
    }
  }
  if (!matrix_.allFinite()) throw Error(ErrorCode::invalid_state, "matrix has non-finite entries");
  if (asymmetry(matrix_) > symmetry_tolerance) {
    throw Error(ErrorCode::invalid_state, "covariance matrix is not symmetric");
  }
  matrix_ = symmetrized(matrix_);
}

std::optional<std::size_t> CovarianceMatrix::index_of(ModeLabel label) const {
  auto it = std::find(modes_.begin(), modes_.end(), label);
  if (it == modes_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - modes_.begin());
}

std::size_t CovarianceMatrix::require(ModeLabel label) const {
  auto index = index_of(label);
  if (!index) throw Error(ErrorCode::invalid_argument, "mode " + to_string(label) + " not in state");
  return *index;
}

bool CovarianceMatrix::has_canonical_order() const { return modes_ == canonical_modes(basis_); }

double CovarianceMatrix::covariance(ModeLabel a, Quadrature qa, ModeLabel b, Quadrature qb) const {
  const auto row = static_cast<Eigen::Index>(2 * require(a) + static_cast<std::size_t>(qa));
  const auto col = static_cast<Eigen::Index>(2 * require(b) + static_cast<std::size_t>(qb));
  return matrix_(row, col);
}

CovarianceMatrix CovarianceMatrix::with_matrix(Eigen::MatrixXd matrix) const {
  return CovarianceMatrix(basis_, modes_, std::move(matrix), omega_hz_, delta_hz_);
}

CovarianceMatrix CovarianceMatrix::with_meta(double omega_hz, double delta_hz) const {
  return CovarianceMatrix(basis_, modes_, matrix_, omega_hz, delta_hz);
}

Eigen::MatrixXd symplectic_form(std::size_t n_modes) {
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; k += 2) {
    omega(k, k + 1) = 1.0;
    omega(k + 1, k) = -1.0;
  }
  return omega;
}

CovarianceMatrix vacuum_covariance(std::size_t n_modes, Basis basis) {
  const auto& labels = canonical_modes(basis);
  if (n_modes == 0 || n_modes > labels.size()) {
    throw Error(ErrorCode::invalid_argument,
                "vacuum needs between 1 and 4 modes, got " + std::to_string(n_modes));
  }
  std::vector<ModeLabel> modes(labels.begin(), labels.begin() + static_cast<long>(n_modes));
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  return CovarianceMatrix(basis, std::move(modes), Eigen::MatrixXd::Identity(dim, dim));
}

const Eigen::Matrix<double, 8, 8>& sa_transform_matrix() {
  static const Eigen::Matrix<double, 8, 8> lambda = [] {
    const double h = 1.0 / std::sqrt(2.0);
    Eigen::Matrix<double, 8, 8> m = Eigen::Matrix<double, 8, 8>::Zero();
    for (int beam = 0; beam < 2; ++beam) {
      const int o = 4 * beam;
      for (int quad = 0; quad < 2; ++quad) {
        // (x_first, x_second) -> ((x_first + x_second), (x_first - x_second)) / √2
        m(o + quad, o + quad) = h;
        m(o + quad, o + 2 + quad) = h;
        m(o + 2 + quad, o + quad) = h;
        m(o + 2 + quad, o + 2 + quad) = -h;
      }
    }
    return m;
  }();
  return lambda;
}

CovarianceMatrix change_basis(const CovarianceMatrix& state, Basis target) {
  if (!state.has_canonical_order()) {
    throw Error(ErrorCode::invalid_state,
                "basis change needs the four canonical modes in canonical order");
  }
  if (state.basis() == target) return state;
  const Eigen::MatrixXd& lambda = sa_transform_matrix();
  Eigen::MatrixXd out = lambda * state.matrix() * lambda.transpose();
  return CovarianceMatrix(target, canonical_modes(target), symmetrized(out), state.omega_hz(),
                          state.delta_hz());
}

std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& matrix,
                                           double symmetry_tolerance) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0 || matrix.rows() % 2 != 0) {
    throw Error(ErrorCode::invalid_state, "symplectic spectrum needs an even square matrix");
  }
  if (asymmetry(matrix) > symmetry_tolerance) {
    throw Error(ErrorCode::invalid_state, "symplectic spectrum of a non-symmetric matrix");
  }
  const auto n = static_cast<std::size_t>(matrix.rows() / 2);
  const Eigen::MatrixXcd product =
      std::complex<double>(0.0, 1.0) * (symplectic_form(n) * symmetrized(matrix)).cast<std::complex<double>>();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(product, false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::internal, "eigen-decomposition of iΩV failed");
  }
  std::vector<double> magnitudes;
  magnitudes.reserve(2 * n);
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    magnitudes.push_back(std::abs(solver.eigenvalues()(k)));
  }
  std::sort(magnitudes.begin(), magnitudes.end());
  // Eigenvalues come in ±ν pairs; keep one of each.
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t k = 0; k < magnitudes.size(); k += 2) {
    out.push_back(0.5 * (magnitudes[k] + magnitudes[k + 1]));
  }
  return out;
}

std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& state) {
  return symplectic_eigenvalues(state.matrix());
}

double min_symplectic_eigenvalue(const CovarianceMatrix& state) {
  return symplectic_eigenvalues(state).front();
}

CovarianceMatrix partial_transpose(const CovarianceMatrix& state,
                                   std::span<const ModeLabel> modes) {
  if (modes.empty() || modes.size() >= state.mode_count()) {
    throw Error(ErrorCode::invalid_argument,
                "partial transpose needs a non-empty proper subset of the modes");
  }
  Eigen::VectorXd signs = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(2 * state.mode_count()));
  for (const ModeLabel& label : modes) {
    const auto q_index = static_cast<Eigen::Index>(2 * state.require(label) + 1);
    if (signs(q_index) < 0) {
      throw Error(ErrorCode::invalid_argument, "mode " + to_string(label) + " listed twice");
    }
    signs(q_index) = -1.0;
  }
  return state.with_matrix(signs.asDiagonal() * state.matrix() * signs.asDiagonal());
}

CovarianceMatrix reduce(const CovarianceMatrix& state, std::span<const ModeLabel> modes) {
  if (modes.empty()) throw Error(ErrorCode::invalid_argument, "reduce needs at least one mode");
  std::vector<Eigen::Index> rows;
  rows.reserve(2 * modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (modes[i] == modes[j]) {
        throw Error(ErrorCode::invalid_argument, "mode " + to_string(modes[i]) + " listed twice");
      }
    }
    const auto index = static_cast<Eigen::Index>(2 * state.require(modes[i]));
    rows.push_back(index);
    rows.push_back(index + 1);
  }
  const auto dim = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd sub(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) sub(r, c) = state.matrix()(rows[r], rows[c]);
  }
  return CovarianceMatrix(state.basis(), std::vector<ModeLabel>(modes.begin(), modes.end()),
                          std::move(sub), state.omega_hz(), state.delta_hz());
}

bool is_physical(const CovarianceMatrix& state, double tolerance) {
  // ν ≥ 1 alone would accept e.g. -I; a covariance must also be positive.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(state.matrix(), Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() <= 0.0) return false;
  return min_symplectic_eigenvalue(state) >= 1.0 - tolerance;
}

CovarianceMatrix attenuate(const CovarianceMatrix& state, double eta) {
  std::vector<double> per_mode(state.mode_count(), eta);
  return state.with_matrix(attenuate(state.matrix(), per_mode));
}

Eigen::MatrixXd attenuate(const Eigen::MatrixXd& matrix, std::span<const double> eta_per_mode) {
  if (matrix.rows() != static_cast<Eigen::Index>(2 * eta_per_mode.size())) {
    throw Error(ErrorCode::invalid_argument, "one transmission per mode is required");
  }
  Eigen::VectorXd amplitude(matrix.rows());
  for (std::size_t k = 0; k < eta_per_mode.size(); ++k) {
    const double eta = eta_per_mode[k];
    if (!(eta > 0.0 && eta <= 1.0)) {
      throw Error(ErrorCode::invalid_argument, "transmission must lie in (0, 1]");
    }
    amplitude(static_cast<Eigen::Index>(2 * k)) = std::sqrt(eta);
    amplitude(static_cast<Eigen::Index>(2 * k + 1)) = std::sqrt(eta);
  }
  Eigen::MatrixXd out = amplitude.asDiagonal() * matrix * amplitude.asDiagonal();
  out.diagonal() += (Eigen::VectorXd::Ones(matrix.rows()) - amplitude.cwiseAbs2());
  return out;
}

Eigen::Matrix2d rotation(double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

CovarianceMatrix rotate_mode(const CovarianceMatrix& state, ModeLabel mode, double angle) {
  const auto dim = static_cast<Eigen::Index>(2 * state.mode_count());
  Eigen::MatrixXd transform = Eigen::MatrixXd::Identity(dim, dim);
  const auto k = static_cast<Eigen::Index>(2 * state.require(mode));
  transform.block<2, 2>(k, k) = rotation(angle);
  return state.with_matrix(symmetrized(transform * state.matrix() * transform.transpose()));
}

Regularized add_minimal_isotropic_noise(const Eigen::MatrixXd& matrix, double tolerance) {
  const Eigen::MatrixXd sym = symmetrized(matrix);
  const double floor = 1.0 - tolerance;
  const auto dim = sym.rows();
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(dim, dim);
  const double nu = symplectic_eigenvalues(sym).front();
  auto feasible = [&](double eps) {
    const Eigen::MatrixXd shifted = sym + eps * identity;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(shifted, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff() > 0.0 && symplectic_eigenvalues(shifted).front() >= floor;
  };
  if (feasible(0.0)) return {sym, 0.0};
  // For positive V, ν_min(V + εI) ≥ ν_min(V) + ε; the doubling loop covers indefinite input.
  double lo = 0.0;
  double hi = std::max(1.0 - nu, 1e-12);
  while (!feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw Error(ErrorCode::internal, "cannot restore physicality");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {sym + hi * identity, hi};
}

}  // namespace twinbeam
