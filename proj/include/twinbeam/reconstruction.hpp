#pragma once

// Covariance reconstruction from resonator-assisted noise spectra: SQL
// calibration, efficiency correction, plateau-based seeding and a damped
// least-squares fit of the 36 independent entries of the 8x8 sideband-basis
// covariance matrix.

#include "twinbeam/cavity.hpp"
#include "twinbeam/gaussian.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace twinbeam {

enum class PhysicalityMode { penalty, project_after };
enum class Initialization { from_plateaus, user_supplied };
enum class FitStatus { converged, underdetermined, max_iterations };

std::string to_string(PhysicalityMode mode);
std::string to_string(Initialization init);
std::string to_string(FitStatus status);
PhysicalityMode parse_physicality_mode(std::string_view text);
Initialization parse_initialization(std::string_view text);
FitStatus parse_fit_status(std::string_view text);

struct FitConfig {
  int max_iterations = 200;
  double gradient_tolerance = 1e-10;
  double parameter_tolerance = 1e-12;
  PhysicalityMode physicality_mode = PhysicalityMode::penalty;
  double penalty_weight = 1e3;
  Initialization initialization = Initialization::from_plateaus;
  std::optional<CovarianceMatrix> seed_state;
  /// Singular values below this fraction of the largest count as rank loss.
  double rank_tolerance = 1e-9;
  double relative_step = 1e-6;

  void validate() const;
};

struct TraceResidual {
  std::string label;
  double rms = 0.0;
};

struct FitResult {
  CovarianceMatrix covariance;
  double residual_rms = 0.0;
  std::vector<TraceResidual> trace_residuals;
  int iterations = 0;
  double condition_estimate = 0.0;
  int rank = 0;
  double physicality_adjustment = 0.0;
  FitStatus status = FitStatus::converged;
};

/// Everything one reconstruction consumes: traces of both beams plus the
/// parameters of the cavity in front of each detector.
struct TraceSet {
  std::vector<SpectrumTrace> single;
  std::vector<CrossTrace> cross;
  CavityParams probe_cavity;
  CavityParams conjugate_cavity;
  double delta_hz = 0.0;

  const CavityParams& cavity(Beam beam) const {
    return beam == Beam::probe ? probe_cavity : conjugate_cavity;
  }
};

inline constexpr double plateau_threshold = 10.0;

/// Detected-level seed (before efficiency correction): sideband variances from
/// the far-detuned single-beam plateaus, pair correlations from far-detuned
/// cross-spectra (Cos·Cos for p, Sin·Sin for q). Throws insufficient-data when
/// a beam has no points beyond |Δ| > 10.
CovarianceMatrix initialize_from_plateaus(const TraceSet& traces);

FitResult fit_covariance(const TraceSet& traces, const FitConfig& config = {});

/// Inverse of the detection loss map: (V − (1 − η) I) / η. Does not repair
/// unphysical results; check with is_physical().
CovarianceMatrix efficiency_correct(const CovarianceMatrix& state, double eta);

struct Calibration {
  SpectrumTrace trace;
  double sql_max_deviation = 0.0;  ///< max |sql / mean(sql) − 1|
  std::optional<std::string> warning;
};

/// Pointwise division by a shot-noise reference recorded on the same grid.
Calibration sql_calibrate(const SpectrumTrace& raw, const SpectrumTrace& sql, double band = 0.05);
std::vector<Calibration> sql_calibrate(std::span<const SpectrumTrace> raw,
                                       std::span<const SpectrumTrace> sql, double band = 0.05);

/// 36 upper-triangle entries (row-major) <-> symmetric 8x8 matrix.
Eigen::VectorXd pack_symmetric(const Eigen::MatrixXd& matrix);
Eigen::MatrixXd unpack_symmetric(const Eigen::VectorXd& entries);

}  // namespace twinbeam
