// One PASS/FAIL line per acceptance criterion, followed by indented detail.
// Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "superatom/kernels.hpp"
#include "superatom/photon_channel.hpp"
#include "superatom/stochastic.hpp"
#include "superatom/superatom.hpp"
#include "superatom/wigner.hpp"

using namespace superatom;
using namespace superatom::model;
using namespace superatom::photon;
using namespace superatom::phase_space;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { details.push_back("     " + what); }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Matrix random_state(std::mt19937_64& rng, long dim, long rank) {
  std::normal_distribution<double> g;
  Matrix a = Matrix::Zero(dim, rank);
  for (long j = 0; j < rank; ++j)
    for (long i = 0; i + 1 < dim; ++i) a(i, j) = Complex(g(rng), g(rng));  // top level left empty
  Matrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

double parity(const Matrix& rho) {
  double s = 0.0;
  for (long n = 0; n < rho.rows(); ++n) s += (n % 2 ? -1.0 : 1.0) * rho(n, n).real();
  return s;
}

// 1. Steady state is maximally mixed; absorption fidelity N/(N+1).
Outcome steady_state_law() {
  Outcome o;
  double worst_td = 0.0, worst_f = 0.0;
  for (long n : {1L, 3L, 9L, 20L, 49L}) {
    for (double ratio : {0.1, 1.0, 7.0}) {
      const auto m = build_model(SuperatomParams::dimensionless(n, ratio));
      const DensityMatrix rho = steady_state(m.generator());
      worst_td = std::max(worst_td, trace_distance(rho, DensityMatrix::maximally_mixed(n + 1)));
      worst_f = std::max(worst_f, std::abs(absorption_fidelity(rho) - static_cast<double>(n) / (n + 1.0)));
    }
  }
  o.check(worst_td < 1e-8, "max trace distance to I/(N+1): " + fmt("%.2e", worst_td) + " (< 1e-8)");
  o.check(worst_f < 1e-8, "max |fidelity - N/(N+1)|: " + fmt("%.2e", worst_f) + " (< 1e-8)");
  return o;
}

// 2. N = 9 absorption traces for gamma/omega_n = 7, 1, 1/3.
Outcome absorption_traces() {
  Outcome o;
  for (double ratio : {7.0, 1.0, 1.0 / 3.0}) {
    const auto p = SuperatomParams::dimensionless(9, ratio);
    const double horizon = default_horizon(p);
    const auto first = simulate_absorption(p, horizon, 4001);
    const auto fit = fit_gamma_eff(first.ground, 9);
    const double settle = 20.0 / fit.gamma_eff;
    // rerun so that t = 20/gamma_eff is a sample, with some tail after it
    const auto tr = simulate_absorption(p, 1.25 * settle, 5001);
    double dev_after = 0.0, at_settle = 0.0;
    for (std::size_t k = 0; k < tr.ground.size(); ++k) {
      if (tr.ground.times[k] >= settle * (1.0 - 1e-12)) {
        dev_after = std::max(dev_after, std::abs(tr.ground.values[k] - 0.1));
        if (at_settle == 0.0) at_settle = tr.ground.values[k];
      }
    }
    const std::string tag = "gamma/omega_n = " + fmt("%.4g", ratio) + ": ";
    o.check(dev_after <= 0.001, tag + "rho_gg at t = 20/gamma_eff = " + fmt("%.6f", at_settle) +
                                    ", max |rho_gg - 0.1| afterwards " + fmt("%.1e", dev_after) + " (<= 1e-3)");
    long crossings = 0;
    bool monotone = true;
    for (std::size_t k = 1; k < tr.ground.size(); ++k) {
      const double a = tr.ground.values[k - 1] - 0.1, b = tr.ground.values[k] - 0.1;
      if ((a > 0.0 && b <= 0.0) || (a < 0.0 && b >= 0.0)) ++crossings;
      if (tr.ground.values[k] > tr.ground.values[k - 1] + 1e-12) monotone = false;
    }
    if (ratio == 7.0) o.check(monotone, tag + "trace monotone: " + (monotone ? "yes" : "no"));
    if (ratio == 1.0)
      o.check(crossings >= 2, tag + "zero crossings of rho_gg - 0.1: " + std::to_string(crossings) + " (>= 2)");
    if (ratio != 7.0 && ratio != 1.0) o.note(tag + "zero crossings " + std::to_string(crossings));
  }
  return o;
}

// 3. Scaling of the fitted rate on both branches and the regime flip.
Outcome inset_scaling() {
  Outcome o;
  const auto p = SuperatomParams::dimensionless(9, 1.0);
  auto spread = [&](const std::vector<double>& ratios, bool plateau, const std::string& label) {
    const auto table = sweep_gamma_eff(p, ratios);
    std::vector<double> v;
    for (const auto& r : table.rows) v.push_back(plateau ? r.gamma_eff_over_gamma : r.gamma_eff_gamma_over_omega_n2);
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double worst = 0.0;
    for (double x : v) worst = std::max(worst, std::abs(x / mean - 1.0));
    std::ostringstream vals;
    for (std::size_t i = 0; i < v.size(); ++i) vals << (i ? ", " : "") << fmt("%.4f", v[i]);
    o.check(worst <= 0.2, label + " = " + fmt("%.4f", mean) + " measured; max relative spread " +
                              fmt("%.3f", worst) + " (<= 0.2)");
    o.note("values: " + vals.str());
  };
  spread(log_spaced(10.0, 50.0, 6), true, "plateau gamma_eff/gamma over omega_n/gamma in [10, 50]");
  spread(log_spaced(0.02, 0.1, 6), false, "overdamped gamma_eff*gamma/omega_n^2 over omega_n/gamma in [0.02, 0.1]");

  const auto table = sweep_gamma_eff(p, log_spaced(0.05, 50.0, 30));
  std::ostringstream regimes;
  for (const auto& r : table.rows) regimes << fmt("%.3g", r.omega_n_over_gamma) << ":" << to_string(r.regime)[0] << " ";
  o.note("regimes (o/c/u): " + regimes.str());
  std::optional<double> lo, hi;
  for (const auto& r : table.rows) {
    if (r.regime == Regime::underdamped) {
      hi = r.omega_n_over_gamma;
      break;
    }
    if (r.regime == Regime::overdamped) lo = r.omega_n_over_gamma;
  }
  if (!table.transition_ratio || !lo || !hi) {
    o.check(false, "regime transition: no overdamped/underdamped bracket on the 30-point grid");
    return o;
  }
  o.note("grid transition at omega_n/gamma = " + fmt("%.4f", *table.transition_ratio));
  try {
    const double refined = locate_regime_transition(p, *lo, *hi);
    o.check(std::abs(refined - 3.0) <= 1.0,
            "regime transition at omega_n/gamma = " + fmt("%.4f", refined) + " (expected 3 +- 1)");
  } catch (const std::exception& e) {
    o.check(false, std::string("transition refinement threw: ") + e.what());
  }
  return o;
}

// 4. Stochastic unraveling against the master equation.
Outcome stochastic_unraveling() {
  Outcome o;
  const auto p = SuperatomParams::dimensionless(9, 1.0);
  const auto m = build_model(p);
  const double t_max = 20.0;
  const auto grid = linspace(0.0, t_max, 201);
  const auto exact = simulate_absorption(p, t_max, grid.size(), 1e-10);
  NoiseSpec noise{p.gamma, 9, 20240601, 0.02, 4000};
  const auto s = stochastic_evolve(DensityMatrix::basis(m.dim(), 0), m.hamiltonian, m.jump_operators, noise, grid);
  double worst = 0.0, worst_se = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    worst = std::max(worst, std::abs(s.ground_population.values[k] - exact.ground.values[k]));
    worst_se = std::max(worst_se, s.ground_stderr[k]);
  }
  o.check(worst < 0.05, "max_t |rho_gg stochastic - Lindblad| = " + fmt("%.4f", worst) + " (< 0.05)");
  o.note("largest standard error " + fmt("%.4f", worst_se) + ", phase variance per step " +
         fmt("%.4g", s.calibration.phase_variance));
  return o;
}

// 5. Long-time channel evolution against the asymptotic map.
Outcome channel_oracle() {
  Outcome o;
  std::mt19937_64 rng(5);
  const double g = 1.0;
  double worst_td = 0.0, worst_pvac = 0.0, worst_ground = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const FockField field(random_state(rng, 13, 1 + trial % 5));
    const auto end = evolve_channel(JointCellField::ground(field), g, {0.0, 25.0 / g}).back();
    const auto r = asymptotic_subtract(field);
    const auto cond = end.conditional_field(Cell::excited);
    if (!cond || !r.rho_out) {
      o.check(false, "trial " + std::to_string(trial) + ": fired branch missing");
      continue;
    }
    worst_td = std::max(worst_td, trace_distance(cond->rho(), r.rho_out->rho()));
    worst_pvac = std::max(worst_pvac, std::abs(r.p_vac - field.vacuum_probability()));
    worst_ground = std::max(worst_ground, std::abs(end.cell_probability(Cell::ground) - field.vacuum_probability()));
  }
  o.check(worst_td < 1e-5, "max trace distance, evolved vs asymptotic output: " + fmt("%.2e", worst_td) + " (< 1e-5)");
  o.check(worst_pvac <= 1e-10, "max |p_vac - rho_00|: " + fmt("%.2e", worst_pvac) + " (<= 1e-10)");
  o.note("max |P(cell in ground) - rho_00| after evolution: " + fmt("%.2e", worst_ground));
  return o;
}

// 6. Fock inputs fire exactly min(n, k) cells.
Outcome cascade_determinism() {
  Outcome o;
  double worst = 0.0;
  for (long n = 0; n <= 10; ++n) {
    for (long k = 1; k <= 6; ++k) {
      const auto r = cascade(FockField::fock(n, 12), k);
      worst = std::max(worst, std::abs(r.fired_distribution[static_cast<std::size_t>(std::min(n, k))] - 1.0));
    }
  }
  o.check(worst <= 1e-10, "max |P(min(n, k) fired) - 1| over n <= 10, k <= 6: " + fmt("%.2e", worst) + " (<= 1e-10)");
  return o;
}

// 7. Wigner identities.
Outcome wigner_identities() {
  Outcome o;
  const double inv_pi = std::numbers::inv_pi;
  const double vac = wigner_at(FockField::vacuum(10), 0.0, 0.0);
  const double one = wigner_at(FockField::fock(1, 10), 0.0, 0.0);
  o.check(std::abs(vac - inv_pi) <= 1e-8, "W_vac(0,0) - 1/pi = " + fmt("%.2e", vac - inv_pi));
  o.check(std::abs(one + inv_pi) <= 1e-8, "W_1(0,0) + 1/pi = " + fmt("%.2e", one + inv_pi));

  const auto sq = prepare(StatePrepSpec::squeezed_coherent(0.2, 0.6));
  std::vector<std::pair<std::string, FockField>> shipped{
      {"vacuum", FockField::vacuum(20)},
      {"fock 1", FockField::fock(1, 20)},
      {"fock 5", FockField::fock(5, 20)},
      {"coherent 0.2", prepare(StatePrepSpec::coherent(0.2))},
      {"squeezed 0.2/0.6", sq},
  };
  for (long k : {1L, 3L, 5L}) shipped.emplace_back("subtracted k=" + std::to_string(k), multi_subtract(sq, k).output);
  double worst = 0.0;
  std::string worst_name;
  for (const auto& [name, field] : shipped) {
    const double e = std::abs(wigner(field).integral - 1.0);
    if (e >= worst) {
      worst = e;
      worst_name = name;
    }
  }
  o.check(worst <= 0.01, "default-grid normalization: max |integral - 1| = " + fmt("%.2e", worst) + " (" + worst_name +
                             ")");

  std::mt19937_64 rng(7);
  double worst_parity = 0.0, literal_ratio = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const FockField f(random_state(rng, 16, 1 + trial % 4));
    const double w0 = wigner_at(f, 0.0, 0.0);
    const double pi_sum = parity(f.rho().matrix());
    // (pi/2) W(0,0) with W normalized over d^2 alpha, which is 2 W(x, p)
    worst_parity = std::max(worst_parity, std::abs(0.5 * std::numbers::pi * (2.0 * w0) - pi_sum));
    if (std::abs(pi_sum) > 1e-3) literal_ratio = 0.5 * std::numbers::pi * w0 / pi_sum;
  }
  o.check(worst_parity <= 1e-8, "parity identity on 20 random states: max deviation " + fmt("%.2e", worst_parity));
  o.note("with W over dx dp the same identity reads pi W(0,0) = sum (-1)^n rho_nn; (pi/2) W(x,p) gives " +
         fmt("%.3f", literal_ratio) + " of it");
  return o;
}

// 8. Structure of the subtracted squeezed state.
Outcome subtracted_structure() {
  Outcome o;
  const auto in = prepare(StatePrepSpec::squeezed_coherent(0.2, 0.6, 20));
  const auto one = multi_subtract(in, 1);
  const auto g1 = wigner(one.output);
  const double w00 = wigner_at(one.output, 0.0, 0.0);
  o.check(negativity_volume(g1) > 0.01, "k = 1: negativity volume " + fmt("%.4f", negativity_volume(g1)) + " (> 0.01)");
  o.check(w00 < 0.0, "k = 1: W(0,0) = " + fmt("%.4f", w00) + " (< 0)");
  for (long k : {3L, 5L}) {
    try {
      const auto r = multi_subtract(in, k);
      const auto g = wigner(r.output);
      o.check(true, "k = " + std::to_string(k) + ": produced, probability " + fmt("%.3e", r.probability) +
                        ", top-level population " + fmt("%.2e", r.output.rho().population(r.output.n_max())) +
                        ", negativity " + fmt("%.4f", negativity_volume(g)) + ", W(0,0) " +
                        fmt("%.4f", wigner_at(r.output, 0.0, 0.0)));
    } catch (const std::exception& e) {
      o.check(false, "k = " + std::to_string(k) + ": " + e.what());
    }
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "steady-state law", 10.0, steady_state_law},
      {2, "absorption traces, N = 9", 5.0, absorption_traces},
      {3, "effective-rate scaling", 60.0, inset_scaling},
      {4, "stochastic unraveling", 120.0, stochastic_unraveling},
      {5, "channel oracle", 30.0, channel_oracle},
      {6, "cascade determinism", 0.0, cascade_determinism},
      {7, "Wigner identities", 0.0, wigner_identities},
      {8, "subtracted squeezed state", 0.0, subtracted_structure},
  };
  std::printf("kernels: %s\n", std::string(kernels::name(kernels::active().isa)).c_str());
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0)
      o.check(secs < c.budget_s, "runtime " + fmt("%.2f", secs) + " s (< " + fmt("%.0f", c.budget_s) + " s)");
    std::printf("CRITERION %d %s: %s (%.2f s)\n", c.id, c.name, o.pass ? "PASS" : "FAIL", secs);
    for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
