#include "support.hpp"

#include "twinbeam/error.hpp"
#include "twinbeam/witness.hpp"

#include <doctest.h>

using namespace twinbeam;
using namespace twinbeam::testing;
using namespace twinbeam::modes;

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

CavityParams default_cavity() { return CavityParams{}; }

}  // namespace

TEST_SUITE("dgcz") {
  TEST_CASE("vacuum sits on the bound") {
    CHECK(dgcz(vacuum_covariance(4), probe_upper, conjugate_lower) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("TMSV closed form") {
    for (double g : {1.0, 2.0, 5.0, 15.0}) {
      const double w = 2 * g - 1 - 2 * std::sqrt(g * (g - 1));
      CHECK(dgcz(tmsv(g), probe_upper, conjugate_lower) == doctest::Approx(w).epsilon(1e-12));
    }
    CHECK(dgcz(tmsv(2.0), probe_upper, conjugate_lower) == doctest::Approx(0.1716).epsilon(1e-4));
  }

  TEST_CASE("a quarter-turn rotation destroys the violation") {
    for (double g : {2.0, 9.0}) {
      const CovarianceMatrix rotated = rotate_mode(tmsv(g), conjugate_lower, M_PI / 2);
      CHECK(dgcz(rotated, probe_upper, conjugate_lower) == doctest::Approx(2 * g - 1).epsilon(1e-12));
    }
  }

  TEST_CASE("identical modes are rejected") {
    CHECK(code_of([] { dgcz(tmsv(2.0), probe_upper, probe_upper); }) == ErrorCode::invalid_argument);
  }
}

TEST_SUITE("ppt") {
  TEST_CASE("vacuum") {
    const std::vector<ModeLabel> side{conjugate_lower};
    CHECK(ppt_min_eigenvalue(vacuum_covariance(4), side) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("TMSV at G = 2") {
    CHECK(ppt_pair(tmsv(2.0), probe_upper, conjugate_lower) == doctest::Approx(3 - 2 * std::sqrt(2.0)).epsilon(1e-10));
  }

  TEST_CASE("local rotations leave the PPT value unchanged") {
    const double reference = ppt_pair(tmsv(6.0), probe_upper, conjugate_lower);
    for (double phi : {0.3, M_PI / 2, 2.0, M_PI}) {
      const CovarianceMatrix r = rotate_mode(tmsv(6.0), conjugate_lower, phi);
      CHECK(ppt_pair(r, probe_upper, conjugate_lower) == doctest::Approx(reference).epsilon(1e-10));
    }
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);
    for (int i = 0; i < 50; ++i) {
      const CovarianceMatrix s = two_mode_state(random_physical_matrix(2, rng));
      const double before = ppt_pair(s, probe_upper, conjugate_lower);
      const CovarianceMatrix r =
          rotate_mode(rotate_mode(s, probe_upper, angle(rng)), conjugate_lower, angle(rng));
      CHECK(std::abs(ppt_pair(r, probe_upper, conjugate_lower) - before) < 1e-9);
    }
  }

  TEST_CASE("bipartition must be a proper subset") {
    const std::vector<ModeLabel> none;
    const std::vector<ModeLabel> all(canonical_modes(Basis::sideband));
    CHECK(code_of([&] { ppt_min_eigenvalue(vacuum_covariance(4), none); }) == ErrorCode::invalid_argument);
    CHECK(code_of([&] { ppt_min_eigenvalue(vacuum_covariance(4), all); }) == ErrorCode::invalid_argument);
  }
}

TEST_SUITE("dgcz versus ppt") {
  TEST_CASE("DGCZ violation implies PPT violation on random states") {
    std::mt19937_64 rng(500);
    int violations = 0;
    for (int i = 0; i < 500; ++i) {
      const CovarianceMatrix s = random_two_mode_state(rng);
      const double w = dgcz(s, probe_upper, conjugate_lower);
      if (w < 1.0) {
        ++violations;
        CHECK(ppt_pair(s, probe_upper, conjugate_lower) < 1.0);
      }
    }
    CHECK(violations > 0);
  }

  TEST_CASE("PPT sees entanglement that DGCZ misses") {
    const CovarianceMatrix r = rotate_mode(tmsv(4.0), conjugate_lower, M_PI / 2);
    CHECK(dgcz(r, probe_upper, conjugate_lower) >= 1.0);
    CHECK(ppt_pair(r, probe_upper, conjugate_lower) < 1.0);
  }
}

TEST_SUITE("energy") {
  TEST_CASE("sideband photon numbers") {
    CHECK(sideband_energy(vacuum_covariance(4), probe_lower) == doctest::Approx(0.0).scale(1.0));
    CHECK(sideband_energy(twin_beam_state(15.0, 9.0), probe_upper) == doctest::Approx(14.0).epsilon(1e-13));
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(8, 8);
    m(0, 0) = m(1, 1) = 3.0;
    const CovarianceMatrix thermal(Basis::sideband, canonical_modes(Basis::sideband), m);
    CHECK(sideband_energy(thermal, probe_upper) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("imbalance of the operating point") {
    const CovarianceMatrix s = twin_beam_state(15.0, 9.0);
    CHECK(energy_imbalance(s, Beam::probe) == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(energy_imbalance(s, Beam::conjugate) == doctest::Approx(-3.0).epsilon(1e-13));
    CHECK(energy_imbalance(twin_beam_state(7.0, 7.0), Beam::probe) == doctest::Approx(0.0).scale(1.0));
  }

  TEST_CASE("imbalances are opposite for the lossless model") {
    const FwmParams p = FwmParams::defaults();
    for (double d = 50e6; d <= 90e6; d += 5e6) {
      const CovarianceMatrix s = synthesize_state(p, d, 7e6);
      const double a = energy_imbalance(s, Beam::probe);
      const double b = energy_imbalance(s, Beam::conjugate);
      CHECK(a == doctest::Approx(-b).epsilon(1e-12));
      CHECK(a > 0.0);
    }
  }

  TEST_CASE("SA input is rejected") {
    const CovarianceMatrix sa = change_basis(vacuum_covariance(4), Basis::sa);
    CHECK(code_of([&] { sideband_energy(sa, probe_upper); }) == ErrorCode::invalid_basis);
  }
}

TEST_SUITE("homodyne emulation") {
  TEST_CASE("balanced states are unchanged") {
    const CovarianceMatrix s = twin_beam_state(6.0, 6.0);
    CHECK(max_abs(emulate_homodyne(s).matrix() - s.matrix()) < 1e-12);
  }

  TEST_CASE("imbalanced sidebands are averaged") {
    const CovarianceMatrix e = emulate_homodyne(twin_beam_state(15.0, 9.0));
    CHECK(e.basis() == Basis::sideband);
    for (ModeLabel m : canonical_modes(Basis::sideband)) CHECK(sideband_energy(e, m) == doctest::Approx(11.0).epsilon(1e-12));
    CHECK(std::abs(energy_imbalance(e, Beam::probe)) < 1e-12);
    CHECK(std::abs(energy_imbalance(e, Beam::conjugate)) < 1e-12);
    CHECK(ppt_pair(e, probe_upper, conjugate_lower) >= 1.0);
    CHECK(ppt_pair(e, probe_lower, conjugate_upper) >= 1.0);
    CHECK(max_abs(e.matrix() - e.matrix().transpose()) == 0.0);
  }

  TEST_CASE("imbalance vanishes on random states") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 20; ++i) {
      const CovarianceMatrix e = emulate_homodyne(random_sideband_state(rng));
      CHECK(std::abs(energy_imbalance(e, Beam::probe)) < 1e-12);
      CHECK(std::abs(energy_imbalance(e, Beam::conjugate)) < 1e-12);
    }
  }

  TEST_CASE("input basis is preserved") {
    const CovarianceMatrix sa = change_basis(twin_beam_state(15.0, 9.0), Basis::sa);
    CHECK(emulate_homodyne(sa).basis() == Basis::sa);
  }

  TEST_CASE("pair PPT never falls across the default family") {
    const FwmParams p = FwmParams::defaults();
    for (double d = 50e6; d <= 95e6; d += 1e6) {
      const CovarianceMatrix s = synthesize_state(p, d, 7e6);
      const CovarianceMatrix e = emulate_homodyne(s);
      CHECK(ppt_pair(e, probe_upper, conjugate_lower) >= ppt_pair(s, probe_upper, conjugate_lower) - 1e-12);
      CHECK(ppt_pair(e, probe_lower, conjugate_upper) >= ppt_pair(s, probe_lower, conjugate_upper) - 1e-12);
    }
  }
}

TEST_SUITE("reports") {
  TEST_CASE("four-mode report layout") {
    const WitnessReport r = evaluate_witnesses(twin_beam_state(15.0, 9.0), Scenario::resonator);
    REQUIRE(r.entries.size() == 3);
    CHECK(r.entry(bipartitions::symmetric).basis == Basis::sa);
    CHECK(r.entry(bipartitions::upper_probe_pair).basis == Basis::sideband);
    CHECK(r.entry(bipartitions::lower_probe_pair).ppt_nu_min < 1.0);
    CHECK(*r.delta_e_probe == doctest::Approx(3.0));
    CHECK(r.physical);
    CHECK(code_of([&] { r.entry("nope"); }) == ErrorCode::invalid_argument);
  }

  TEST_CASE("vacuum is on every boundary") {
    const WitnessReport r = evaluate_witnesses(vacuum_covariance(4), Scenario::resonator);
    for (const auto& e : r.entries) {
      CHECK(e.dgcz == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(e.ppt_nu_min == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("two-mode report") {
    const WitnessReport r = evaluate_witnesses(tmsv(2.0), Scenario::resonator);
    REQUIRE(r.entries.size() == 1);
    CHECK(r.entries[0].ppt_nu_min == doctest::Approx(0.1716).epsilon(1e-4));
    CHECK_FALSE(r.delta_e_probe.has_value());
    CHECK(code_of([] { evaluate_witnesses(tmsv(2.0), Scenario::homodyne_emulated); }) == ErrorCode::invalid_argument);
  }

  TEST_CASE("scenario names round-trip") {
    for (Scenario s : {Scenario::resonator, Scenario::homodyne_emulated}) CHECK(parse_scenario(to_string(s)) == s);
    CHECK(code_of([] { parse_scenario("bogus"); }) == ErrorCode::invalid_argument);
  }
}

TEST_SUITE("sweep") {
  const FwmParams p = FwmParams::defaults();
  const CavityParams c = default_cavity();

  TEST_CASE("pairs coincide at the gain peak") {
    const std::vector<double> grid{p.delta_max_hz};
    const WitnessReport r = witness_sweep(p, c, grid, Scenario::resonator).front();
    const auto& a = r.entry(bipartitions::upper_probe_pair);
    const auto& b = r.entry(bipartitions::lower_probe_pair);
    CHECK(a.dgcz == doctest::Approx(b.dgcz).epsilon(1e-12));
    CHECK(a.ppt_nu_min == doctest::Approx(b.ppt_nu_min).epsilon(1e-12));
    CHECK(std::abs(*r.delta_e_probe) < 1e-12);
  }

  TEST_CASE("imbalance grows along the default grid") {
    std::vector<double> grid;
    for (int k = 50; k <= 75; ++k) grid.push_back(k * 1e6);
    const auto reports = witness_sweep(p, c, grid, Scenario::resonator);
    REQUIRE(reports.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(reports[i].delta_hz == grid[i]);
    for (std::size_t i = 1; i < reports.size(); ++i) {
      CHECK(std::abs(*reports[i].delta_e_probe) > std::abs(*reports[i - 1].delta_e_probe));
    }
  }

  TEST_CASE("pair violations only survive with the resonator") {
    std::vector<double> grid;
    for (int k = 50; k <= 75; ++k) grid.push_back(k * 1e6);
    const auto full = witness_sweep(p, c, grid, Scenario::resonator);
    const auto emulated = witness_sweep(p, c, grid, Scenario::homodyne_emulated);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(full[i].scenario == Scenario::resonator);
      CHECK(emulated[i].scenario == Scenario::homodyne_emulated);
      CHECK(full[i].entry(bipartitions::upper_probe_pair).ppt_nu_min < 1.0);
      CHECK(full[i].entry(bipartitions::lower_probe_pair).ppt_nu_min < 1.0);
      CHECK(emulated[i].entry(bipartitions::upper_probe_pair).ppt_nu_min >= 1.0);
      CHECK(emulated[i].entry(bipartitions::lower_probe_pair).ppt_nu_min >= 1.0);
      // The symmetric-quadrature pair does not see the imbalance.
      const auto& fs = full[i].entry(bipartitions::symmetric);
      const auto& es = emulated[i].entry(bipartitions::symmetric);
      CHECK(fs.ppt_nu_min == doctest::Approx(es.ppt_nu_min).epsilon(1e-10));
      CHECK(fs.dgcz == doctest::Approx(es.dgcz).epsilon(1e-10));
    }
  }

  TEST_CASE("empty grid") {
    const std::vector<double> grid;
    CHECK(code_of([&] { witness_sweep(p, c, grid, Scenario::resonator); }) == ErrorCode::invalid_argument);
  }
}
