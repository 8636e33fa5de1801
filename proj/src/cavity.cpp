#include "twinbeam/cavity.hpp"

#include "twinbeam/error.hpp"

#include <cmath>

namespace twinbeam {

using Vector8 = Eigen::Matrix<double, 8, 1>;

void CavityParams::validate() const {
  if (!(gamma_hz > 0.0)) throw Error(ErrorCode::invalid_argument, "cavity bandwidth must be positive");
  if (!(r0_power >= 0.0 && r0_power <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "on-resonance reflectance must lie in [0, 1]");
  }
  if (!(omega_hz > 0.0)) throw Error(ErrorCode::invalid_argument, "analysis frequency must be positive");
  if (!(eta_det > 0.0 && eta_det <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "detection efficiency must lie in (0, 1]");
  }
}

bool CavityParams::rotation_condition_met() const { return omega_hz >= std::sqrt(2.0) * gamma_hz; }

std::complex<double> reflection(const CavityParams& params, double detuning_norm) {
  const double depth = 1.0 - std::sqrt(params.r0_power);
  return 1.0 - depth / std::complex<double>(1.0, 2.0 * detuning_norm);
}

MeasurementCoeffs measurement_coeffs(const CavityParams& params, double detuning_norm,
                                     double demod_phase) {
  const double shift = params.omega_norm();
  const std::complex<double> carrier = reflection(params, detuning_norm);
  const std::complex<double> upper = reflection(params, detuning_norm + shift);
  const std::complex<double> lower = reflection(params, detuning_norm - shift);
  const std::complex<double> reference = std::polar(1.0, demod_phase);
  // Beat notes α*·a₊ and α·a₋† with the reflected carrier α.
  return {reference * std::conj(carrier) * upper, reference * carrier * std::conj(lower)};
}

Eigen::Vector4d quadrature_weights(const MeasurementCoeffs& coeffs) {
  return {coeffs.upper.real(), -coeffs.upper.imag(), coeffs.lower.real(), coeffs.lower.imag()};
}

namespace {

Eigen::Index beam_offset(Beam beam) { return beam == Beam::probe ? 0 : 4; }

Vector8 embed(Beam beam, const Eigen::Vector4d& weights) {
  Vector8 out = Vector8::Zero();
  out.segment<4>(beam_offset(beam)) = weights;
  return out;
}

Vector8 normalized_weights(Beam beam, const CavityParams& params, double detuning, double phase) {
  const Eigen::Vector4d w = quadrature_weights(measurement_coeffs(params, detuning, phase));
  const double norm = w.norm();
  if (!(norm > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "cavity fully absorbs both sidebands at this detuning");
  }
  return embed(beam, w / norm);
}

Eigen::MatrixXd canonical_sideband_matrix(const CovarianceMatrix& state) {
  if (state.basis() != Basis::sideband) {
    throw Error(ErrorCode::invalid_basis, "detection model needs a sideband-basis state");
  }
  if (state.has_canonical_order()) return state.matrix();
  if (state.mode_count() != 4) {
    throw Error(ErrorCode::invalid_argument, "detection model needs all four sideband modes");
  }
  return reduce(state, canonical_modes(Basis::sideband)).matrix();
}

Eigen::MatrixXd checked_matrix(const CovarianceMatrix& state) {
  Eigen::MatrixXd m = canonical_sideband_matrix(state);
  if (!is_physical(state)) throw Error(ErrorCode::invalid_state, "detection of a non-physical state");
  return m;
}

}  // namespace

LinearFunctional single_beam_functional(Beam beam, const CavityParams& params, double detuning_norm,
                                        double demod_phase) {
  params.validate();
  const Vector8 e = normalized_weights(beam, params, detuning_norm, demod_phase);
  const double amplitude = std::sqrt(params.eta_det);
  LinearFunctional f;
  f.left = amplitude * e;
  f.right = f.left;
  f.offset = 1.0 - params.eta_det;
  return f;
}

LinearFunctional cross_functional(const CavityParams& probe_params,
                                  const CavityParams& conjugate_params, double detuning_probe,
                                  double detuning_conjugate, double phase_probe,
                                  double phase_conjugate) {
  probe_params.validate();
  conjugate_params.validate();
  LinearFunctional f;
  f.left = std::sqrt(probe_params.eta_det) *
           normalized_weights(Beam::probe, probe_params, detuning_probe, phase_probe);
  f.right = std::sqrt(conjugate_params.eta_det) *
            normalized_weights(Beam::conjugate, conjugate_params, detuning_conjugate, phase_conjugate);
  return f;
}

SpectrumTrace single_beam_spectrum(const CovarianceMatrix& state, Beam beam,
                                   const CavityParams& params, std::span<const double> grid,
                                   double demod_phase) {
  const Eigen::MatrixXd m = checked_matrix(state);
  SpectrumTrace trace;
  trace.beam = beam;
  trace.demod_phase = demod_phase;
  trace.detuning.assign(grid.begin(), grid.end());
  trace.values.reserve(grid.size());
  for (double detuning : grid) {
    trace.values.push_back(single_beam_functional(beam, params, detuning, demod_phase).evaluate(m));
  }
  return trace;
}

double cross_spectrum(const CovarianceMatrix& state, const CavityParams& probe_params,
                      const CavityParams& conjugate_params, double detuning_probe,
                      double detuning_conjugate, double phase_probe, double phase_conjugate) {
  const Eigen::MatrixXd m = checked_matrix(state);
  return cross_functional(probe_params, conjugate_params, detuning_probe, detuning_conjugate,
                          phase_probe, phase_conjugate)
      .evaluate(m);
}

CrossTrace cross_spectrum_trace(const CovarianceMatrix& state, const CavityParams& probe_params,
                                const CavityParams& conjugate_params,
                                std::span<const double> detuning_probe,
                                std::span<const double> detuning_conjugate, double phase_probe,
                                double phase_conjugate) {
  if (detuning_probe.size() != detuning_conjugate.size()) {
    throw Error(ErrorCode::invalid_argument, "cross trace needs paired detunings");
  }
  const Eigen::MatrixXd m = checked_matrix(state);
  CrossTrace trace;
  trace.phase_probe = phase_probe;
  trace.phase_conjugate = phase_conjugate;
  trace.detuning_probe.assign(detuning_probe.begin(), detuning_probe.end());
  trace.detuning_conjugate.assign(detuning_conjugate.begin(), detuning_conjugate.end());
  trace.values.reserve(detuning_probe.size());
  for (std::size_t i = 0; i < detuning_probe.size(); ++i) {
    trace.values.push_back(cross_functional(probe_params, conjugate_params, detuning_probe[i],
                                            detuning_conjugate[i], phase_probe, phase_conjugate)
                               .evaluate(m));
  }
  return trace;
}

double direct_detection_noise(const CovarianceMatrix& state, Beam beam, double eta_det,
                              double demod_phase) {
  const Eigen::MatrixXd m = canonical_sideband_matrix(state);
  const std::complex<double> reference = std::polar(1.0, demod_phase);
  const Vector8 e = embed(beam, quadrature_weights({reference, reference}) / std::sqrt(2.0));
  return eta_det * e.dot(m * e) + (1.0 - eta_det);
}

std::vector<double> uniform_grid(double start, double stop, std::size_t count) {
  if (count == 0) throw Error(ErrorCode::invalid_argument, "grid needs at least one point");
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = start;
    return grid;
  }
  const double step = (stop - start) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) grid[i] = start + step * static_cast<double>(i);
  grid.back() = stop;
  return grid;
}

}  // namespace twinbeam
