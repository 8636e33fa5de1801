#include "twinbeam/fwm.hpp"

#include "twinbeam/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace twinbeam {

GainTable::GainTable(std::vector<double> delta_hz, std::vector<double> gain)
    : delta_hz_(std::move(delta_hz)), gain_(std::move(gain)) {
  if (delta_hz_.empty() || delta_hz_.size() != gain_.size()) {
    throw Error(ErrorCode::invalid_argument, "gain table needs matching, non-empty columns");
  }
  for (std::size_t i = 1; i < delta_hz_.size(); ++i) {
    if (!(delta_hz_[i] > delta_hz_[i - 1])) {
      throw Error(ErrorCode::invalid_argument, "gain table detunings must be strictly increasing");
    }
  }
  for (double g : gain_) {
    if (!(g >= 1.0)) throw Error(ErrorCode::invalid_argument, "tabulated gain below 1");
  }
}

double GainTable::at(double delta_hz) const {
  if (delta_hz <= delta_hz_.front()) return gain_.front();
  if (delta_hz >= delta_hz_.back()) return gain_.back();
  const auto upper = std::upper_bound(delta_hz_.begin(), delta_hz_.end(), delta_hz);
  const auto i = static_cast<std::size_t>(upper - delta_hz_.begin());
  const double x0 = delta_hz_[i - 1];
  const double x1 = delta_hz_[i];
  if (delta_hz == x0) return gain_[i - 1];
  const double t = (delta_hz - x0) / (x1 - x0);
  return gain_[i - 1] + t * (gain_[i] - gain_[i - 1]);
}

void FwmParams::validate() const {
  if (!(g_max >= 1.0)) throw Error(ErrorCode::invalid_argument, "g_max must be ≥ 1");
  if (!(width_hz > 0.0)) throw Error(ErrorCode::invalid_argument, "width must be positive");
  if (!(loss_eta_medium > 0.0 && loss_eta_medium <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "loss_eta_medium must lie in (0, 1]");
  }
  if (!std::isfinite(delta_max_hz) || !std::isfinite(phase_slope_rad_per_hz)) {
    throw Error(ErrorCode::invalid_argument, "non-finite amplifier parameter");
  }
}

LorentzianShape solve_lorentzian(double delta_max_hz, double x1_hz, double g1, double x2_hz,
                                 double g2) {
  // (g1 − 1)(1 + d1²/w²) = (g2 − 1)(1 + d2²/w²) = g_max − 1
  const double a1 = g1 - 1.0;
  const double a2 = g2 - 1.0;
  const double d1 = (x1_hz - delta_max_hz) * (x1_hz - delta_max_hz);
  const double d2 = (x2_hz - delta_max_hz) * (x2_hz - delta_max_hz);
  const double denominator = a1 - a2;
  if (!(a1 > 0.0 && a2 > 0.0) || denominator == 0.0) {
    throw Error(ErrorCode::invalid_argument, "two-point Lorentzian system has no solution");
  }
  const double width_squared = (a2 * d2 - a1 * d1) / denominator;
  if (!(width_squared > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "two-point Lorentzian system has no positive width");
  }
  return {1.0 + a1 * (1.0 + d1 / width_squared), std::sqrt(width_squared)};
}

FwmParams FwmParams::defaults() {
  FwmParams params;
  params.delta_max_hz = 95e6;
  const LorentzianShape shape = solve_lorentzian(95e6, 84e6, 15.0, 72e6, 9.0);
  params.g_max = shape.g_max;
  params.width_hz = shape.width_hz;
  return params;
}

double gain(const FwmParams& params, double delta_eff_hz) {
  if (params.table) return params.table->at(delta_eff_hz);
  const double x = (delta_eff_hz - params.delta_max_hz) / params.width_hz;
  return 1.0 + (params.g_max - 1.0) / (1.0 + x * x);
}

PairGains pair_gains(const FwmParams& params, double delta_hz, double omega_hz) {
  if (!(omega_hz > 0.0)) throw Error(ErrorCode::invalid_argument, "analysis frequency must be positive");
  return {gain(params, delta_hz + omega_hz), gain(params, delta_hz - omega_hz)};
}

CovarianceMatrix twin_beam_state(double g1, double g2, double phi1, double phi2, double loss_eta,
                                 double omega_hz, double delta_hz) {
  if (!(g1 >= 1.0 && g2 >= 1.0)) throw Error(ErrorCode::invalid_argument, "pair gain below 1");
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(8, 8);
  const auto fill_pair = [&v](Eigen::Index probe, Eigen::Index conjugate, double g, double phi) {
    const double diagonal = 2.0 * g - 1.0;
    const double c = 2.0 * std::sqrt(g * (g - 1.0));
    const Eigen::Matrix2d r = rotation(phi);
    const Eigen::Matrix2d cross = r * Eigen::Vector2d(c, -c).asDiagonal() * r.transpose();
    v.block<2, 2>(probe, probe) = diagonal * Eigen::Matrix2d::Identity();
    v.block<2, 2>(conjugate, conjugate) = diagonal * Eigen::Matrix2d::Identity();
    v.block<2, 2>(probe, conjugate) = cross;
    v.block<2, 2>(conjugate, probe) = cross.transpose();
  };
  // Canonical order: probe +Ω (0), probe −Ω (2), conjugate +Ω (4), conjugate −Ω (6).
  fill_pair(0, 6, g1, phi1);
  fill_pair(2, 4, g2, phi2);
  CovarianceMatrix state(Basis::sideband, canonical_modes(Basis::sideband), v, omega_hz, delta_hz);
  if (loss_eta != 1.0) state = attenuate(state, loss_eta);
  return state;
}

CovarianceMatrix synthesize_state(const FwmParams& params, double delta_hz, double omega_hz) {
  params.validate();
  const PairGains g = pair_gains(params, delta_hz, omega_hz);
  const double phi = params.phase_slope_rad_per_hz * omega_hz;
  CovarianceMatrix state = twin_beam_state(g.upper_probe, g.lower_probe, phi, -phi,
                                           params.loss_eta_medium, omega_hz, delta_hz);
  const std::vector<double> spectrum = symplectic_eigenvalues(state);
  if (spectrum.front() < 1.0 - Tolerances{}.physicality) {
    throw Error(ErrorCode::internal, "synthesized state is not physical", spectrum);
  }
  return state;
}

IntensityGains mean_intensity_gain(const FwmParams& params, double delta_hz) {
  const double g = gain(params, delta_hz);
  return {g, g - 1.0};
}

namespace {

// out_k = Σ_j A_kj in_j + B_kj in_j† over (a₊, a₋, b₊, b₋).
struct Bogoliubov {
  Eigen::Matrix4cd a = Eigen::Matrix4cd::Zero();
  Eigen::Matrix4cd b = Eigen::Matrix4cd::Zero();
};

Bogoliubov assemble(const Eigen::Matrix4cd& plus, const Eigen::Matrix4cd& minus) {
  constexpr int ap = 0, am = 1, bp = 2, bm = 3;
  Bogoliubov t;
  // M(+Ω) acts on (a₊, a₋†, b₊, b₋†); rows 0 and 2 are a₊ and b₊ at the output.
  for (int row : {0, 2}) {
    const int k = row == 0 ? ap : bp;
    t.a(k, ap) = plus(row, 0);
    t.b(k, am) = plus(row, 1);
    t.a(k, bp) = plus(row, 2);
    t.b(k, bm) = plus(row, 3);
  }
  // M(−Ω) acts on (a₋, a₊†, b₋, b₊†); rows 0 and 2 are a₋ and b₋.
  for (int row : {0, 2}) {
    const int k = row == 0 ? am : bm;
    t.a(k, am) = minus(row, 0);
    t.b(k, ap) = minus(row, 1);
    t.a(k, bm) = minus(row, 2);
    t.b(k, bp) = minus(row, 3);
  }
  return t;
}

Eigen::MatrixXd quadrature_map(const Bogoliubov& t) {
  const Eigen::Matrix4cd sum = t.a + t.b;
  const Eigen::Matrix4cd diff = t.a - t.b;
  Eigen::MatrixXd s(8, 8);
  for (int k = 0; k < 4; ++k) {
    for (int j = 0; j < 4; ++j) {
      s(2 * k, 2 * j) = sum(k, j).real();
      s(2 * k, 2 * j + 1) = -diff(k, j).imag();
      s(2 * k + 1, 2 * j) = sum(k, j).imag();
      s(2 * k + 1, 2 * j + 1) = diff(k, j).real();
    }
  }
  return s;
}

}  // namespace

PluginSynthesis synthesize_from_plugin(const PropagatorPlugin& plugin, double omega_hz,
                                       double delta_hz) {
  if (!plugin.propagator) throw Error(ErrorCode::invalid_argument, "plugin has no propagator");
  if (!(omega_hz > 0.0)) throw Error(ErrorCode::invalid_argument, "analysis frequency must be positive");
  const Eigen::MatrixXd s = quadrature_map(assemble(plugin.propagator(omega_hz), plugin.propagator(-omega_hz)));
  if (!s.allFinite()) throw Error(ErrorCode::plugin_contract, "propagator returned non-finite entries");

  const Eigen::MatrixXd omega = symplectic_form(4);
  const double violation = (s * omega * s.transpose() - omega).cwiseAbs().maxCoeff();
  Eigen::MatrixXd v = s * s.transpose();
  v = 0.5 * (v + v.transpose());

  double added = 0.0;
  if (plugin.lossless) {
    if (violation > plugin.contract_tolerance) {
      throw Error(ErrorCode::plugin_contract,
                  "lossless propagator does not preserve commutators (max deviation " +
                      std::to_string(violation) + ")",
                  {violation});
    }
  } else {
    Regularized fixed = add_minimal_isotropic_noise(v);
    v = std::move(fixed.matrix);
    added = fixed.added_noise;
  }
  return {CovarianceMatrix(Basis::sideband, canonical_modes(Basis::sideband), v, omega_hz, delta_hz),
          added};
}

Propagator bogoliubov_propagator(double squeezing) {
  const double c = std::cosh(squeezing);
  const double s = std::sinh(squeezing);
  return [c, s](double) {
    Eigen::Matrix4cd m;
    m << c, 0, 0, s,
         0, c, s, 0,
         0, s, c, 0,
         s, 0, 0, c;
    return m;
  };
}

}  // namespace twinbeam
