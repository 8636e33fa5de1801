#include "support.hpp"

#include "twinbeam/error.hpp"
#include "twinbeam/fwm.hpp"
#include "twinbeam/witness.hpp"

#include <doctest.h>

using namespace twinbeam;
using namespace twinbeam::testing;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::internal;
}

Eigen::Matrix4cd squeezer(std::complex<double> a, std::complex<double> b) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = m(1, 1) = m(2, 2) = m(3, 3) = a;
  m(0, 3) = m(1, 2) = m(2, 1) = m(3, 0) = b;
  return m;
}

}  // namespace

TEST_SUITE("gain profile") {
  const FwmParams p = FwmParams::defaults();

  TEST_CASE("peak value at the centre") { CHECK(gain(p, p.delta_max_hz) == doctest::Approx(p.g_max)); }

  TEST_CASE("unity far from resonance") {
    CHECK(gain(p, 1e12) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(gain(p, -1e12) == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("two-point Lorentzian solve through 15 at 84 MHz and 9 at 72 MHz") {
    const LorentzianShape s = solve_lorentzian(95e6, 84e6, 15.0, 72e6, 9.0);
    CHECK(s.width_hz == doctest::Approx(std::sqrt(423.0) * 1e6).epsilon(1e-12));
    CHECK(s.width_hz == doctest::Approx(20.6e6).epsilon(0.005));
    CHECK(s.g_max == doctest::Approx(19.0).epsilon(0.001));
    CHECK(gain(p, 84e6) == doctest::Approx(15.0).epsilon(1e-12));
    CHECK(gain(p, 72e6) == doctest::Approx(9.0).epsilon(1e-12));
  }

  TEST_CASE("unsolvable two-point systems are invalid arguments") {
    CHECK(code_of([] { solve_lorentzian(95e6, 84e6, 9.0, 72e6, 15.0); }) == ErrorCode::invalid_argument);
  }

  TEST_CASE("parameter validation") {
    FwmParams bad = p;
    bad.g_max = 0.5;
    CHECK(code_of([&] { bad.validate(); }) == ErrorCode::invalid_argument);
    bad = p;
    bad.width_hz = 0.0;
    CHECK(code_of([&] { bad.validate(); }) == ErrorCode::invalid_argument);
    bad = p;
    bad.loss_eta_medium = 0.0;
    CHECK(code_of([&] { bad.validate(); }) == ErrorCode::invalid_argument);
  }

  TEST_CASE("tabulated profile interpolates and clamps") {
    FwmParams t = p;
    t.table = GainTable({60e6, 80e6, 100e6}, {3.0, 11.0, 5.0});
    CHECK(gain(t, 80e6) == 11.0);
    CHECK(gain(t, 70e6) == doctest::Approx(7.0));
    CHECK(gain(t, 10e6) == 3.0);
    CHECK(gain(t, 200e6) == 5.0);
    CHECK(code_of([] { GainTable({1.0, 1.0}, {2.0, 2.0}); }) == ErrorCode::invalid_argument);
    CHECK(code_of([] { GainTable({1.0, 2.0}, {2.0, 0.5}); }) == ErrorCode::invalid_argument);
  }
}

TEST_SUITE("pair gains") {
  const FwmParams p = FwmParams::defaults();

  TEST_CASE("equal at the symmetric point") {
    const PairGains g = pair_gains(p, p.delta_max_hz, 7e6);
    CHECK(g.upper_probe == doctest::Approx(g.lower_probe).epsilon(1e-14));
  }

  TEST_CASE("upper-probe pair is stronger below the peak") {
    for (double delta : {40e6, 60e6, 80e6, 94e6}) {
      const PairGains g = pair_gains(p, delta, 7e6);
      CHECK(g.upper_probe > g.lower_probe);
    }
  }

  TEST_CASE("operating point is near 15 and 9") {
    for (double delta : {75e6, 77e6}) {
      const PairGains g = pair_gains(p, delta, 7e6);
      CHECK(g.upper_probe == doctest::Approx(15.0).epsilon(0.2));
      CHECK(g.lower_probe == doctest::Approx(9.0).epsilon(0.2));
    }
    CHECK(pair_gains(p, 77e6, 7e6).upper_probe == doctest::Approx(15.0).epsilon(1e-12));
  }

  TEST_CASE("needs a positive analysis frequency") {
    CHECK(code_of([&] { pair_gains(p, 75e6, 0.0); }) == ErrorCode::invalid_argument);
  }
}

TEST_SUITE("synthesis") {
  TEST_CASE("unit gain is vacuum") {
    FwmParams p = FwmParams::defaults();
    p.g_max = 1.0;
    CHECK(max_abs(synthesize_state(p, 75e6, 7e6).matrix() - Eigen::MatrixXd::Identity(8, 8)) < 1e-15);
    CHECK(max_abs(twin_beam_state(1.0, 1.0).matrix() - Eigen::MatrixXd::Identity(8, 8)) == 0.0);
  }

  TEST_CASE("single G=2 pair") {
    const CovarianceMatrix s = twin_beam_state(2.0, 1.0);
    const CovarianceMatrix pair = reduce(s, std::vector{modes::probe_upper, modes::conjugate_lower});
    Eigen::Matrix4d expected = Eigen::Matrix4d::Identity() * 3.0;
    expected(0, 2) = expected(2, 0) = 2.0 * std::sqrt(2.0);
    expected(1, 3) = expected(3, 1) = -2.0 * std::sqrt(2.0);
    CHECK(max_abs(pair.matrix() - expected) < 1e-15);
    CHECK(ppt_min_eigenvalue(pair, std::vector{modes::conjugate_lower}) ==
          doctest::Approx(3.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-12));
  }

  TEST_CASE("sideband energies of the 15/9 fixture") {
    const CovarianceMatrix s = twin_beam_state(15.0, 9.0);
    CHECK(sideband_energy(s, modes::probe_upper) == doctest::Approx(14.0).epsilon(1e-14));
    CHECK(sideband_energy(s, modes::probe_lower) == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(sideband_energy(s, modes::conjugate_lower) == doctest::Approx(14.0).epsilon(1e-14));
    CHECK(sideband_energy(s, modes::conjugate_upper) == doctest::Approx(8.0).epsilon(1e-14));
  }

  TEST_CASE("phase rotation of the cross block") {
    const double phi = 0.3;
    const CovarianceMatrix s = twin_beam_state(3.0, 1.0, phi, 0.0);
    const double c = 2.0 * std::sqrt(6.0);
    const Eigen::Matrix2d z = Eigen::Vector2d(c, -c).asDiagonal();
    const Eigen::Matrix2d expected = rotation(phi) * z * rotation(phi).transpose();
    CHECK(max_abs(s.matrix().block<2, 2>(0, 6) - expected) < 1e-14);
  }

  TEST_CASE("medium loss mixes toward vacuum") {
    const CovarianceMatrix s = twin_beam_state(3.0, 2.0, 0.0, 0.0, 0.5);
    CHECK(s.matrix()(0, 0) == doctest::Approx(0.5 * 5.0 + 0.5));
    CHECK(is_physical(s));
    CHECK(symplectic_eigenvalues(s).back() > 1.0 + 1e-3);
  }

  TEST_CASE("metadata is carried") {
    const CovarianceMatrix s = synthesize_state(FwmParams::defaults(), 75e6, 7e6);
    CHECK(s.omega_hz() == 7e6);
    CHECK(s.delta_hz() == 75e6);
    CHECK(s.basis() == Basis::sideband);
    CHECK(s.has_canonical_order());
  }
}

TEST_SUITE("synthesis properties") {
  TEST_CASE("energy pairing of twin photons") {
    const FwmParams p = FwmParams::defaults();
    for (double delta : {50e6, 62e6, 75e6, 101e6}) {
      const CovarianceMatrix s = synthesize_state(p, delta, 7e6);
      CHECK(sideband_energy(s, modes::probe_upper) == doctest::Approx(sideband_energy(s, modes::conjugate_lower)));
      CHECK(sideband_energy(s, modes::probe_lower) == doctest::Approx(sideband_energy(s, modes::conjugate_upper)));
    }
  }

  TEST_CASE("physical over a 50x20 grid") {
    FwmParams p = FwmParams::defaults();
    p.phase_slope_rad_per_hz = 1e-7;
    double worst = 2.0;
    for (int i = 0; i < 50; ++i) {
      for (int j = 0; j < 20; ++j) {
        const CovarianceMatrix s = synthesize_state(p, 40e6 + 2e6 * i, 1e6 + 1e6 * j);
        worst = std::min(worst, symplectic_eigenvalues(s).front());
      }
    }
    CHECK(worst >= 1.0 - 1e-9);
  }

  TEST_CASE("pure at any squeezing phase without loss") {
    for (double phi : {0.0, 0.4, 1.3, 2.9}) {
      for (double nu : symplectic_eigenvalues(twin_beam_state(15.0, 9.0, phi, -phi))) {
        CHECK(nu == doctest::Approx(1.0).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("imbalance is antisymmetric between beams") {
    const FwmParams p = FwmParams::defaults();
    for (double delta : {50e6, 75e6, 110e6}) {
      const CovarianceMatrix s = synthesize_state(p, delta, 7e6);
      CHECK(energy_imbalance(s, Beam::probe) == doctest::Approx(-energy_imbalance(s, Beam::conjugate)));
    }
  }
}

TEST_SUITE("propagator plugin") {
  TEST_CASE("identity propagator gives vacuum") {
    const PluginSynthesis out =
        synthesize_from_plugin({[](double) { return Eigen::Matrix4cd::Identity().eval(); }, true}, 7e6);
    CHECK(max_abs(out.state.matrix() - Eigen::MatrixXd::Identity(8, 8)) < 1e-15);
    CHECK(out.added_noise == 0.0);
  }

  TEST_CASE("Bogoliubov squeezer matches the phenomenological model") {
    for (double r : {0.1, 0.5, 1.0, 2.0}) {
      const PluginSynthesis out = synthesize_from_plugin({bogoliubov_propagator(r), true}, 7e6);
      const double g = std::cosh(r) * std::cosh(r);
      CHECK(max_abs(out.state.matrix() - twin_beam_state(g, g).matrix()) < 1e-10 * g);
    }
  }

  TEST_CASE("commutator breach in lossless mode") {
    const auto bad = [](double) { return squeezer(std::sqrt(1.4), std::sqrt(0.5)); };
    CHECK(code_of([&] { synthesize_from_plugin({bad, true}, 7e6); }) == ErrorCode::plugin_contract);
  }

  TEST_CASE("lossy propagator gets the minimal isotropic noise") {
    const auto lossy = [](double) { return (0.8 * Eigen::Matrix4cd::Identity()).eval(); };
    const PluginSynthesis out = synthesize_from_plugin({lossy, false}, 7e6);
    CHECK(out.added_noise == doctest::Approx(0.36).epsilon(1e-9));
    CHECK(is_physical(out.state));
  }
}

TEST_SUITE("intensity gain") {
  TEST_CASE("unit gain leaves no conjugate") {
    FwmParams p = FwmParams::defaults();
    p.g_max = 1.0;
    const IntensityGains g = mean_intensity_gain(p, 80e6);
    CHECK(g.probe == 1.0);
    CHECK(g.conjugate == 0.0);
  }

  TEST_CASE("G=9 on a 100 uW seed") {
    FwmParams p = FwmParams::defaults();
    const IntensityGains g = mean_intensity_gain(p, 72e6);
    CHECK(100.0 * g.probe == doctest::Approx(900.0).epsilon(1e-12));
    CHECK(100.0 * g.conjugate == doctest::Approx(800.0).epsilon(1e-12));
  }

  TEST_CASE("probe and conjugate peak together") {
    const FwmParams p = FwmParams::defaults();
    double best_probe = 0.0, best_conj = 0.0, at_probe = 0.0, at_conj = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double delta = 50e6 + 0.5e6 * i;
      const IntensityGains g = mean_intensity_gain(p, delta);
      if (g.probe > best_probe) best_probe = g.probe, at_probe = delta;
      if (g.conjugate > best_conj) best_conj = g.conjugate, at_conj = delta;
    }
    CHECK(at_probe == at_conj);
    CHECK(at_probe == doctest::Approx(95e6));
  }
}
