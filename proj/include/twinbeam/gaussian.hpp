#pragma once

// Covariance-matrix algebra for the two-beam, four-sideband Gaussian states.
//
// Conventions: a = (p + i q) / 2, so every quadrature of the vacuum has unit
// variance (shot-noise units). Each mode contributes the pair (p, q) to the
// phase-space vector, in the order given by the state's mode list.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace twinbeam {

enum class Beam { probe, conjugate };
enum class Basis { sideband, sa };
enum class Component { upper, lower, symmetric, antisymmetric };
enum class Quadrature { p = 0, q = 1 };

struct ModeLabel {
  Beam beam;
  Component component;

  friend bool operator==(const ModeLabel&, const ModeLabel&) = default;
};

namespace modes {
inline constexpr ModeLabel probe_upper{Beam::probe, Component::upper};
inline constexpr ModeLabel probe_lower{Beam::probe, Component::lower};
inline constexpr ModeLabel conjugate_upper{Beam::conjugate, Component::upper};
inline constexpr ModeLabel conjugate_lower{Beam::conjugate, Component::lower};
inline constexpr ModeLabel probe_symmetric{Beam::probe, Component::symmetric};
inline constexpr ModeLabel probe_antisymmetric{Beam::probe, Component::antisymmetric};
inline constexpr ModeLabel conjugate_symmetric{Beam::conjugate, Component::symmetric};
inline constexpr ModeLabel conjugate_antisymmetric{Beam::conjugate, Component::antisymmetric};
}  // namespace modes

std::string to_string(Beam beam);
std::string to_string(Basis basis);
std::string to_string(ModeLabel label);
Beam parse_beam(std::string_view text);
Basis parse_basis(std::string_view text);
ModeLabel parse_mode_label(std::string_view text);

Basis basis_of(Component component);
Beam other(Beam beam);

/// (probe +Ω, probe −Ω, conjugate +Ω, conjugate −Ω) or
/// (probe S, probe A, conjugate S, conjugate A).
const std::vector<ModeLabel>& canonical_modes(Basis basis);

struct Tolerances {
  double symmetry = 1e-12;
  double physicality = 1e-9;
};

/// Basis-tagged real symmetric covariance matrix. The constructor enforces the
/// structural invariants (shape, symmetry, distinct labels of the tagged
/// basis); physicality is a separate query because homodyne emulation
/// legitimately produces unphysical matrices.
class CovarianceMatrix {
 public:
  CovarianceMatrix(Basis basis, std::vector<ModeLabel> modes, Eigen::MatrixXd matrix,
                   double omega_hz = 0.0, double delta_hz = 0.0,
                   double symmetry_tolerance = Tolerances{}.symmetry);

  Basis basis() const noexcept { return basis_; }
  const std::vector<ModeLabel>& modes() const noexcept { return modes_; }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  double omega_hz() const noexcept { return omega_hz_; }
  double delta_hz() const noexcept { return delta_hz_; }
  std::size_t mode_count() const noexcept { return modes_.size(); }

  std::optional<std::size_t> index_of(ModeLabel label) const;
  /// Index of a mode, throwing invalid-argument when absent.
  std::size_t require(ModeLabel label) const;
  bool has_canonical_order() const;

  /// Symmetrized second moment ⟨x_a x_b⟩ of two quadratures.
  double covariance(ModeLabel a, Quadrature qa, ModeLabel b, Quadrature qb) const;
  double variance(ModeLabel a, Quadrature qa) const { return covariance(a, qa, a, qa); }

  CovarianceMatrix with_matrix(Eigen::MatrixXd matrix) const;
  CovarianceMatrix with_meta(double omega_hz, double delta_hz) const;

 private:
  Basis basis_;
  std::vector<ModeLabel> modes_;
  Eigen::MatrixXd matrix_;
  double omega_hz_;
  double delta_hz_;
};

/// Block-diagonal symplectic form with per-mode blocks [[0, 1], [-1, 0]].
Eigen::MatrixXd symplectic_form(std::size_t n_modes);

CovarianceMatrix vacuum_covariance(std::size_t n_modes, Basis basis = Basis::sideband);

/// 8x8 map from SA quadratures to sideband quadratures (and back; it is its
/// own inverse). Built per beam from (1/√2)[[1, 1], [1, -1]] ⊗ I₂.
const Eigen::Matrix<double, 8, 8>& sa_transform_matrix();

/// Congruence by Λ. Requires the four canonical modes in canonical order.
CovarianceMatrix change_basis(const CovarianceMatrix& state, Basis target);

/// Symplectic eigenvalues (ascending, one per mode) from the spectrum of
/// i·Ω·V. Throws invalid-state for non-symmetric or odd-sized input.
std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& matrix,
                                           double symmetry_tolerance = Tolerances{}.symmetry);
std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& state);
double min_symplectic_eigenvalue(const CovarianceMatrix& state);

/// Flips the sign of the q quadrature of every listed mode.
CovarianceMatrix partial_transpose(const CovarianceMatrix& state, std::span<const ModeLabel> modes);
CovarianceMatrix reduce(const CovarianceMatrix& state, std::span<const ModeLabel> modes);
bool is_physical(const CovarianceMatrix& state, double tolerance = Tolerances{}.physicality);

/// Beam-splitter loss V -> ηV + (1-η)I applied to every mode.
CovarianceMatrix attenuate(const CovarianceMatrix& state, double eta);
/// Loss with a per-mode transmission (one entry per mode).
Eigen::MatrixXd attenuate(const Eigen::MatrixXd& matrix, std::span<const double> eta_per_mode);

/// Phase-space rotation of one mode by `angle` (p -> p cos - q sin, q -> p sin + q cos).
CovarianceMatrix rotate_mode(const CovarianceMatrix& state, ModeLabel mode, double angle);

Eigen::Matrix2d rotation(double angle);

struct Regularized {
  Eigen::MatrixXd matrix;
  double added_noise = 0.0;
};

/// Smallest ε ≥ 0 (to bisection precision) such that V + εI has every
/// symplectic eigenvalue ≥ 1 - tolerance.
Regularized add_minimal_isotropic_noise(const Eigen::MatrixXd& matrix,
                                        double tolerance = Tolerances{}.physicality);

}  // namespace twinbeam
