#include <doctest.h>

#include <cmath>

#include "superatom/superatom.hpp"

using namespace superatom;
using namespace superatom::model;

namespace {

TimeSeries synthetic(long n, double t_max, std::size_t samples, double lambda, double omega = 0.0) {
  TimeSeries s;
  s.times = linspace(0.0, t_max, samples);
  const double target = 1.0 / (n + 1.0);
  for (double t : s.times) s.values.push_back(target + (1.0 - target) * std::exp(-lambda * t) * std::cos(omega * t));
  return s;
}

}  // namespace

TEST_CASE("fit recovers a pure exponential") {
  const auto s = synthetic(9, 20.0 / 0.37, 2001, 0.37);
  const auto fit = fit_gamma_eff(s, 9);
  CHECK(fit.gamma_eff == doctest::Approx(0.37).epsilon(1e-6));
  CHECK(fit.regime == Regime::overdamped);
  CHECK(fit.zero_crossings == 0);
  CHECK_FALSE(fit.used_envelope);
}

TEST_CASE("fit recovers the envelope of a damped oscillation") {
  const auto s = synthetic(9, 40.0, 8001, 0.25, 3.0);
  const auto fit = fit_gamma_eff(s, 9);
  CHECK(fit.regime == Regime::underdamped);
  CHECK(fit.used_envelope);
  CHECK(fit.envelope_points >= 3);
  CHECK(fit.gamma_eff == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("fit rejects short or degenerate series") {
  CHECK_THROWS_WITH_AS(fit_gamma_eff(synthetic(9, 2.0, 200, 0.37), 9), doctest::Contains("too short"), ValidationError);
  TimeSeries flat{linspace(0.0, 1.0, 10), std::vector<double>(10, 0.1), "flat"};
  CHECK_THROWS_AS(fit_gamma_eff(flat, 9), ValidationError);
  TimeSeries tiny{{0.0, 1.0}, {1.0, 0.1}, "tiny"};
  CHECK_THROWS_AS(fit_gamma_eff(tiny, 9), ValidationError);
}

TEST_CASE("fitted rate does not depend on the sampling density") {
  for (double ratio : {10.0, 0.2}) {
    const auto p = SuperatomParams::dimensionless(9, ratio);
    const double t_max = default_horizon(p);
    const auto a = fit_gamma_eff(simulate_absorption(p, t_max, 4001).ground, 9);
    const auto b = fit_gamma_eff(simulate_absorption(p, t_max, 8001).ground, 9);
    CHECK(std::abs(a.gamma_eff - b.gamma_eff) <= std::max(3.0 * (a.fit_residual + b.fit_residual), 1e-3) * a.gamma_eff);
    CHECK(a.regime == b.regime);
  }
}

TEST_CASE("regimes at the ends of the sweep") {
  const auto p = SuperatomParams::dimensionless(9, 1.0);
  const auto over = gamma_eff_point(p, 0.1);
  CHECK(over.regime == Regime::overdamped);
  MESSAGE("Omega_N/Gamma = 0.1: Gamma_eff Gamma / Omega_N^2 = " << over.gamma_eff_gamma_over_omega_n2);
  const auto under = gamma_eff_point(p, 20.0);
  CHECK(under.regime == Regime::underdamped);
  MESSAGE("Omega_N/Gamma = 20: Gamma_eff / Gamma = " << under.gamma_eff_over_gamma);
  CHECK(under.gamma_eff_over_gamma >= 0.5);
  CHECK(under.gamma_eff_over_gamma <= 1.0);
}

TEST_CASE("sweep table and grid helpers") {
  const auto p = SuperatomParams::dimensionless(9, 1.0);
  const auto one = sweep_gamma_eff(p, {0.5});
  CHECK(one.rows.size() == 1);
  CHECK_THROWS_AS(sweep_gamma_eff(p, {}), ValidationError);
  CHECK_THROWS_AS(sweep_gamma_eff(p, {-1.0}), ValidationError);

  const auto g = log_spaced(0.05, 50.0, 30);
  REQUIRE(g.size() == 30);
  CHECK(g.front() == 0.05);
  CHECK(g.back() == 50.0);
  for (std::size_t i = 2; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(g[1] / g[0]));

  const auto t = sweep_gamma_eff(p, {0.05, 0.1, 0.2});
  for (std::size_t i = 1; i < t.rows.size(); ++i) CHECK(t.rows[i].gamma_eff > t.rows[i - 1].gamma_eff);
  CHECK(std::string(to_string(Regime::crossover)) == "crossover");
}
