#pragma once

// Resonator-assisted detection. Each beam is reflected off a single-pole
// cavity before photodetection; the cavity attenuates and phase-shifts the
// carrier and the two sidebands independently, and the photocurrent at the
// analysis frequency is demodulated against a reference of phase φ_d
// (0 = "Cos", π/2 = "Sin").
//
// Detunings are in units of the cavity full bandwidth Γ and measured as
// carrier minus cavity resonance, so a frequency offset ω from the carrier
// sits at Δ + ω/Γ relative to the resonance: the upper sideband is resonant
// at Δ = −Ω/Γ and the lower one at Δ = +Ω/Γ.

#include "twinbeam/gaussian.hpp"

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace twinbeam {

struct CavityParams {
  double gamma_hz = 3.37e6;  ///< full bandwidth Γ/2π
  double finesse = 87.4;     ///< metadata only
  double r0_power = 0.5;     ///< on-resonance power reflectance
  double omega_hz = 7e6;     ///< analysis frequency Ω/2π
  double eta_det = 0.83;     ///< overall detection efficiency

  void validate() const;
  /// Ω ≥ √2·Γ, needed for a full rotation of the sideband quadratures.
  bool rotation_condition_met() const;
  double omega_norm() const { return omega_hz / gamma_hz; }
};

/// r(x) = 1 − (1 − √r0) / (1 + 2ix) for a frequency x bandwidths from resonance.
std::complex<double> reflection(const CavityParams& params, double detuning_norm);

struct MeasurementCoeffs {
  std::complex<double> upper;  ///< β₊, multiplies a₊
  std::complex<double> lower;  ///< β₋, multiplies a₋†
};

MeasurementCoeffs measurement_coeffs(const CavityParams& params, double detuning_norm,
                                     double demod_phase);

/// Real weights (Re β₊, −Im β₊, Re β₋, Im β₋) over (p₊, q₊, p₋, q₋).
Eigen::Vector4d quadrature_weights(const MeasurementCoeffs& coeffs);

/// One measured number written as an affine functional of the source
/// covariance: value = leftᵀ V right + offset, in canonical sideband coordinates.
/// Detection loss is folded into the vectors and the offset.
struct LinearFunctional {
  Eigen::Matrix<double, 8, 1> left = Eigen::Matrix<double, 8, 1>::Zero();
  Eigen::Matrix<double, 8, 1> right = Eigen::Matrix<double, 8, 1>::Zero();
  double offset = 0.0;

  double evaluate(const Eigen::MatrixXd& matrix) const {
    return left.dot(matrix * right) + offset;
  }
};

LinearFunctional single_beam_functional(Beam beam, const CavityParams& params, double detuning_norm,
                                        double demod_phase);
LinearFunctional cross_functional(const CavityParams& probe_params,
                                  const CavityParams& conjugate_params, double detuning_probe,
                                  double detuning_conjugate, double phase_probe,
                                  double phase_conjugate);

struct SpectrumTrace {
  Beam beam = Beam::probe;
  double demod_phase = 0.0;
  std::vector<double> detuning;  ///< Δ in units of Γ, ascending
  std::vector<double> values;    ///< noise power normalized to the SQL
  std::string label;
};

/// Probe-conjugate cross-spectrum sampled at explicit (Δ_pr, Δ_cj) pairs.
struct CrossTrace {
  double phase_probe = 0.0;
  double phase_conjugate = 0.0;
  std::vector<double> detuning_probe;
  std::vector<double> detuning_conjugate;
  std::vector<double> values;
  std::string label;
};

SpectrumTrace single_beam_spectrum(const CovarianceMatrix& state, Beam beam,
                                   const CavityParams& params, std::span<const double> grid,
                                   double demod_phase);

double cross_spectrum(const CovarianceMatrix& state, const CavityParams& probe_params,
                      const CavityParams& conjugate_params, double detuning_probe,
                      double detuning_conjugate, double phase_probe, double phase_conjugate);

CrossTrace cross_spectrum_trace(const CovarianceMatrix& state, const CavityParams& probe_params,
                                const CavityParams& conjugate_params,
                                std::span<const double> detuning_probe,
                                std::span<const double> detuning_conjugate, double phase_probe,
                                double phase_conjugate);

/// Noise of the demodulated photocurrent without any cavity (direct detection),
/// SQL-normalized, after detection loss.
double direct_detection_noise(const CovarianceMatrix& state, Beam beam, double eta_det,
                              double demod_phase);

std::vector<double> uniform_grid(double start, double stop, std::size_t count);

}  // namespace twinbeam
