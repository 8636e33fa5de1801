#pragma once

// Entanglement and energy diagnostics on covariance matrices.

#include "twinbeam/cavity.hpp"
#include "twinbeam/fwm.hpp"
#include "twinbeam/gaussian.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace twinbeam {

enum class Scenario {
  resonator,          ///< full reconstruction, ΔE ≠ 0 retained
  homodyne_emulated,  ///< sideband imbalance discarded, ΔE = 0
};

std::string to_string(Scenario scenario);
Scenario parse_scenario(std::string_view text);

/// Sum variance W = [Δ²((p₁ − p₂)/√2) + Δ²((q₁ + q₂)/√2)] / 2. Separable states
/// have W ≥ 1; vacuum sits on the bound.
double dgcz(const CovarianceMatrix& state, ModeLabel first, ModeLabel second);

/// Smallest symplectic eigenvalue after transposing `transposed` (one side of
/// the bipartition).
double ppt_min_eigenvalue(const CovarianceMatrix& state, std::span<const ModeLabel> transposed);

/// PPT value of the two-mode reduction (first, second), second transposed.
double ppt_pair(const CovarianceMatrix& state, ModeLabel first, ModeLabel second);

/// Mean photon number (Δ²p + Δ²q)/4 − 1/2 of a sideband mode.
double sideband_energy(const CovarianceMatrix& state, ModeLabel mode);

/// ΔE = [E(+Ω) − E(−Ω)] / 2 for one beam.
double energy_imbalance(const CovarianceMatrix& state, Beam beam);

/// Discards what direct or homodyne detection cannot see: in the SA basis the
/// S–A correlations within each beam are zeroed (the ⟨p_S p_A⟩-type terms
/// that carry the sideband imbalance), probe–conjugate terms are kept. The
/// result is returned in the input basis and may be unphysical.
CovarianceMatrix emulate_homodyne(const CovarianceMatrix& state);

struct BipartitionWitness {
  std::string label;
  Basis basis = Basis::sideband;
  double dgcz = 0.0;
  double ppt_nu_min = 0.0;
};

struct WitnessReport {
  double delta_hz = 0.0;
  Scenario scenario = Scenario::resonator;
  std::vector<BipartitionWitness> entries;
  std::optional<double> delta_e_probe;
  std::optional<double> delta_e_conjugate;
  bool physical = true;  ///< false when the evaluated matrix is not a valid state

  const BipartitionWitness& entry(std::string_view label) const;
};

namespace bipartitions {
inline constexpr std::string_view symmetric = "S_pr|S_cj";
inline constexpr std::string_view upper_probe_pair = "+pr|-cj";
inline constexpr std::string_view lower_probe_pair = "-pr|+cj";
}  // namespace bipartitions

/// Witnesses of one state. Four-mode states get the SA-basis symmetric pair and
/// both sideband pairs; two-mode states get their single bipartition.
WitnessReport evaluate_witnesses(const CovarianceMatrix& state, Scenario scenario);

/// Synthesizes the amplifier state at every δ (analysis frequency from the
/// cavity) and evaluates it. Points run concurrently; output order follows the grid.
std::vector<WitnessReport> witness_sweep(const FwmParams& params, const CavityParams& cavity,
                                         std::span<const double> delta_grid, Scenario scenario);

}  // namespace twinbeam
