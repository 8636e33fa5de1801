#include "twinbeam/witness.hpp"

#include "twinbeam/error.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace twinbeam {

std::string to_string(Scenario scenario) {
  return scenario == Scenario::resonator ? "resonator" : "homodyne_emulated";
}

Scenario parse_scenario(std::string_view text) {
  if (text == "resonator") return Scenario::resonator;
  if (text == "homodyne_emulated") return Scenario::homodyne_emulated;
  throw Error(ErrorCode::invalid_argument, "unknown scenario '" + std::string(text) + "'");
}

double dgcz(const CovarianceMatrix& state, ModeLabel first, ModeLabel second) {
  if (first == second) throw Error(ErrorCode::invalid_argument, "DGCZ needs two distinct modes");
  using Q = Quadrature;
  const double p_minus = 0.5 * (state.variance(first, Q::p) + state.variance(second, Q::p) -
                                2.0 * state.covariance(first, Q::p, second, Q::p));
  const double q_plus = 0.5 * (state.variance(first, Q::q) + state.variance(second, Q::q) +
                               2.0 * state.covariance(first, Q::q, second, Q::q));
  return 0.5 * (p_minus + q_plus);
}

double ppt_min_eigenvalue(const CovarianceMatrix& state, std::span<const ModeLabel> transposed) {
  return min_symplectic_eigenvalue(partial_transpose(state, transposed));
}

double ppt_pair(const CovarianceMatrix& state, ModeLabel first, ModeLabel second) {
  const std::array pair{first, second};
  const std::array side{second};
  return ppt_min_eigenvalue(reduce(state, pair), side);
}

double sideband_energy(const CovarianceMatrix& state, ModeLabel mode) {
  if (state.basis() != Basis::sideband) {
    throw Error(ErrorCode::invalid_basis, "sideband energies need a sideband-basis state");
  }
  return 0.25 * (state.variance(mode, Quadrature::p) + state.variance(mode, Quadrature::q)) - 0.5;
}

double energy_imbalance(const CovarianceMatrix& state, Beam beam) {
  return 0.5 * (sideband_energy(state, {beam, Component::upper}) -
                sideband_energy(state, {beam, Component::lower}));
}

CovarianceMatrix emulate_homodyne(const CovarianceMatrix& state) {
  const CovarianceMatrix sa = change_basis(state, Basis::sa);
  Eigen::MatrixXd m = sa.matrix();
  // SA canonical order: probe S, probe A, conjugate S, conjugate A.
  for (Eigen::Index beam = 0; beam < 2; ++beam) {
    const Eigen::Index s = 4 * beam;
    m.block<2, 2>(s, s + 2).setZero();
    m.block<2, 2>(s + 2, s).setZero();
  }
  return change_basis(sa.with_matrix(std::move(m)), state.basis());
}

const BipartitionWitness& WitnessReport::entry(std::string_view label) const {
  for (const auto& e : entries) {
    if (e.label == label) return e;
  }
  throw Error(ErrorCode::invalid_argument, "no bipartition '" + std::string(label) + "' in report");
}

WitnessReport evaluate_witnesses(const CovarianceMatrix& input, Scenario scenario) {
  WitnessReport report;
  report.delta_hz = input.delta_hz();
  report.scenario = scenario;

  if (input.mode_count() == 2) {
    if (scenario == Scenario::homodyne_emulated) {
      throw Error(ErrorCode::invalid_argument, "homodyne emulation needs a four-mode state");
    }
    const ModeLabel a = input.modes()[0];
    const ModeLabel b = input.modes()[1];
    report.physical = is_physical(input);
    report.entries.push_back({to_string(a) + "|" + to_string(b), input.basis(), dgcz(input, a, b),
                              ppt_pair(input, a, b)});
    return report;
  }
  if (input.mode_count() != 4) {
    throw Error(ErrorCode::invalid_argument, "witnesses need a two- or four-mode state");
  }

  CovarianceMatrix state = input.has_canonical_order()
                               ? input
                               : reduce(input, canonical_modes(input.basis()));
  if (scenario == Scenario::homodyne_emulated) state = emulate_homodyne(state);
  report.physical = is_physical(state);

  const CovarianceMatrix sideband = change_basis(state, Basis::sideband);
  const CovarianceMatrix sa = change_basis(state, Basis::sa);
  using namespace modes;
  report.entries.push_back({std::string(bipartitions::symmetric), Basis::sa,
                            dgcz(sa, probe_symmetric, conjugate_symmetric),
                            ppt_pair(sa, probe_symmetric, conjugate_symmetric)});
  report.entries.push_back({std::string(bipartitions::upper_probe_pair), Basis::sideband,
                            dgcz(sideband, probe_upper, conjugate_lower),
                            ppt_pair(sideband, probe_upper, conjugate_lower)});
  report.entries.push_back({std::string(bipartitions::lower_probe_pair), Basis::sideband,
                            dgcz(sideband, probe_lower, conjugate_upper),
                            ppt_pair(sideband, probe_lower, conjugate_upper)});
  report.delta_e_probe = energy_imbalance(sideband, Beam::probe);
  report.delta_e_conjugate = energy_imbalance(sideband, Beam::conjugate);
  return report;
}

std::vector<WitnessReport> witness_sweep(const FwmParams& params, const CavityParams& cavity,
                                         std::span<const double> delta_grid, Scenario scenario) {
  if (delta_grid.empty()) throw Error(ErrorCode::invalid_argument, "empty detuning grid");
  params.validate();
  cavity.validate();
  std::vector<std::optional<WitnessReport>> slots(delta_grid.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < slots.size(); i = next++) {
      try {
        slots[i] = evaluate_witnesses(synthesize_state(params, delta_grid[i], cavity.omega_hz),
                                      scenario);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(slots.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  std::vector<WitnessReport> reports;
  reports.reserve(slots.size());
  for (auto& slot : slots) reports.push_back(std::move(*slot));
  return reports;
}

}  // namespace twinbeam
