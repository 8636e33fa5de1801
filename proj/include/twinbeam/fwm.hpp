#pragma once

// Phenomenological four-wave-mixing amplifier: a gain profile versus two-photon
// detuning, the pairwise coupling of sidebands (+Ω probe with −Ω conjugate and
// −Ω probe with +Ω conjugate), and synthesis of the resulting twin-beam state.

#include "twinbeam/gaussian.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace twinbeam {

/// Piecewise-linear tabulated gain, clamped to the end values outside the table.
class GainTable {
 public:
  GainTable(std::vector<double> delta_hz, std::vector<double> gain);

  double at(double delta_hz) const;
  const std::vector<double>& delta_hz() const noexcept { return delta_hz_; }
  const std::vector<double>& gain() const noexcept { return gain_; }

 private:
  std::vector<double> delta_hz_;
  std::vector<double> gain_;
};

struct FwmParams {
  double delta_max_hz = 95e6;
  double g_max = 1.0;
  double width_hz = 1.0;
  double phase_slope_rad_per_hz = 0.0;
  double loss_eta_medium = 1.0;
  /// When set, replaces the Lorentzian profile.
  std::optional<GainTable> table;

  void validate() const;

  /// Lorentzian peaked at 95 MHz through G(84 MHz) = 15 and G(72 MHz) = 9.
  static FwmParams defaults();
};

struct LorentzianShape {
  double g_max;
  double width_hz;
};

/// Closed-form (g_max, width) of the Lorentzian peaked at `delta_max_hz` that passes
/// through the two points (x1, g1) and (x2, g2).
LorentzianShape solve_lorentzian(double delta_max_hz, double x1_hz, double g1, double x2_hz,
                                 double g2);

/// G(δ) = 1 + (g_max − 1) / (1 + ((δ − δ_max) / width)²), or the table value.
double gain(const FwmParams& params, double delta_eff_hz);

struct PairGains {
  double upper_probe;  ///< G₁ for the pair [+Ω probe, −Ω conjugate], gain(δ + Ω)
  double lower_probe;  ///< G₂ for the pair [−Ω probe, +Ω conjugate], gain(δ − Ω)
};

PairGains pair_gains(const FwmParams& params, double delta_hz, double omega_hz);

/// Two independent two-mode squeezed pairs with gains (G₁, G₂) and squeezing
/// phase rotations (φ₁, φ₂), followed by the medium loss map.
CovarianceMatrix twin_beam_state(double g1, double g2, double phi1 = 0.0, double phi2 = 0.0,
                                 double loss_eta = 1.0, double omega_hz = 0.0,
                                 double delta_hz = 0.0);

/// Sideband-basis state of the amplifier at two-photon detuning δ, analysis
/// frequency Ω. φ_k = phase_slope · (±Ω).
CovarianceMatrix synthesize_state(const FwmParams& params, double delta_hz, double omega_hz);

struct IntensityGains {
  double probe;
  double conjugate;
};

/// Carrier-level output powers relative to the seed: G for the probe, G − 1 for the conjugate.
IntensityGains mean_intensity_gain(const FwmParams& params, double delta_hz);

/// Sideband propagator e^{R(ω) z}: maps (a(ω), a†(−ω), b(ω), b†(−ω)) at the
/// cell input to the output.
using Propagator = std::function<Eigen::Matrix4cd(double omega_hz)>;

struct PropagatorPlugin {
  Propagator propagator;
  bool lossless = true;
  double contract_tolerance = 1e-9;
};

struct PluginSynthesis {
  CovarianceMatrix state;
  double added_noise = 0.0;  ///< isotropic noise added to restore physicality (lossy plugins)
};

/// Builds the four-sideband state from M(+Ω) and M(−Ω) acting on vacuum.
PluginSynthesis synthesize_from_plugin(const PropagatorPlugin& plugin, double omega_hz,
                                       double delta_hz = 0.0);

/// Frequency-independent two-mode squeezer with squeezing parameter r.
Propagator bogoliubov_propagator(double squeezing);

}  // namespace twinbeam
