#pragma once

// Shared fixtures: random physical states and small matrix helpers.

#include "twinbeam/fwm.hpp"
#include "twinbeam/gaussian.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace twinbeam::testing {

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

/// Random symplectic matrix on n modes: layers of local rotations, single-mode
/// squeezers and beam splitters in per-mode (p, q) order.
inline Eigen::MatrixXd random_symplectic(std::size_t n, std::mt19937_64& rng, double max_squeeze = 0.8) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> squeeze(-max_squeeze, max_squeeze);
  const auto dim = static_cast<Eigen::Index>(2 * n);
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(dim, dim);
  for (int layer = 0; layer < 3; ++layer) {
    for (std::size_t k = 0; k < n; ++k) {
      Eigen::MatrixXd local = Eigen::MatrixXd::Identity(dim, dim);
      const auto o = static_cast<Eigen::Index>(2 * k);
      const double r = squeeze(rng);
      local.block<2, 2>(o, o) = rotation(angle(rng)) * Eigen::Vector2d(std::exp(r), std::exp(-r)).asDiagonal() *
                                rotation(angle(rng));
      s = local * s;
    }
    for (std::size_t j = 0; j + 1 < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        const double t = angle(rng);
        Eigen::MatrixXd bs = Eigen::MatrixXd::Identity(dim, dim);
        const auto a = static_cast<Eigen::Index>(2 * j), b = static_cast<Eigen::Index>(2 * k);
        bs.block<2, 2>(a, a) *= std::cos(t);
        bs.block<2, 2>(b, b) *= std::cos(t);
        bs.block<2, 2>(a, b) = std::sin(t) * Eigen::Matrix2d::Identity();
        bs.block<2, 2>(b, a) = -std::sin(t) * Eigen::Matrix2d::Identity();
        s = bs * s;
      }
    }
  }
  return s;
}

/// S·diag(ν)·Sᵀ with thermal symplectic eigenvalues ν ∈ [1, 1 + max_thermal].
inline Eigen::MatrixXd random_physical_matrix(std::size_t n, std::mt19937_64& rng, double max_thermal = 2.0,
                                              double max_squeeze = 0.8) {
  std::uniform_real_distribution<double> thermal(0.0, max_thermal);
  Eigen::VectorXd nu(static_cast<Eigen::Index>(2 * n));
  for (std::size_t k = 0; k < n; ++k) nu(2 * k) = nu(2 * k + 1) = 1.0 + thermal(rng);
  const Eigen::MatrixXd s = random_symplectic(n, rng, max_squeeze);
  const Eigen::MatrixXd v = s * nu.asDiagonal() * s.transpose();
  return 0.5 * (v + v.transpose());
}

inline CovarianceMatrix random_sideband_state(std::mt19937_64& rng, double max_thermal = 2.0) {
  return CovarianceMatrix(Basis::sideband, canonical_modes(Basis::sideband), random_physical_matrix(4, rng, max_thermal));
}

inline CovarianceMatrix two_mode_state(const Eigen::MatrixXd& m) {
  return CovarianceMatrix(Basis::sideband, {modes::probe_upper, modes::conjugate_lower}, m);
}

/// Two-mode squeezed vacuum with G = cosh²r on (probe_upper, conjugate_lower).
inline CovarianceMatrix tmsv(double gain) {
  const double c = 2.0 * std::sqrt(gain * (gain - 1.0));
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity() * (2.0 * gain - 1.0);
  m(0, 2) = m(2, 0) = c;
  m(1, 3) = m(3, 1) = -c;
  return two_mode_state(m);
}

/// Mixed two-mode ensemble: every other draw is an EPR-like state (TMSV with
/// random gain, small local rotations and loss) so that both DGCZ-violating
/// and generic states are well represented.
inline CovarianceMatrix random_two_mode_state(std::mt19937_64& rng) {
  if (rng() % 2 == 0) return two_mode_state(random_physical_matrix(2, rng, 1.0, 1.2));
  std::uniform_real_distribution<double> gain(1.0, 10.0), angle(-0.6, 0.6), eta(0.3, 1.0);
  CovarianceMatrix s = tmsv(gain(rng));
  s = rotate_mode(rotate_mode(s, modes::probe_upper, angle(rng)), modes::conjugate_lower, angle(rng));
  return attenuate(s, eta(rng));
}

}  // namespace twinbeam::testing
