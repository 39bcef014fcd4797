#include <algorithm>
#include <cmath>

#include "superatom/superatom.hpp"

namespace superatom::model {

SuperatomModel build_model(const SuperatomParams& p) {
  p.validate();
  const long n = p.n_atoms;
  const long d = n + 1;
  // <i|H|G> = Omega_N / (2 sqrt N) = Omega / 2 for every site, so <W|H|G> = Omega_N / 2.
  const double coupling = 0.5 * two_photon_rabi(p);
  Matrix h = Matrix::Zero(d, d);
  for (long i = 1; i < d; ++i) {
    h(i, 0) = coupling;
    h(0, i) = coupling;
  }
  SuperatomModel m;
  m.n_atoms = n;
  m.hamiltonian = Operator::hamiltonian(std::move(h), "H_superatom");
  for (long i = 1; i < d; ++i) m.jump_operators.push_back(Operator::projector(d, i));
  m.rate = p.gamma;
  m.basis_labels.push_back("G");
  for (long i = 1; i < d; ++i) m.basis_labels.push_back("site_" + std::to_string(i));
  return m;
}

Vector w_state(long n_atoms) {
  Vector w = Vector::Zero(n_atoms + 1);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n_atoms));
  for (long i = 1; i <= n_atoms; ++i) w[i] = amp;
  return w;
}

Matrix dark_projector(long n_atoms) {
  const long d = n_atoms + 1;
  Matrix p = Matrix::Zero(d, d);
  for (long i = 1; i < d; ++i) p(i, i) = 1.0;
  const Vector w = w_state(n_atoms);
  return p - w * w.adjoint();
}

CollectivePopulations collective_populations(const DensityMatrix& rho) {
  const long n = rho.dim() - 1;
  if (n < 1) throw ValidationError("superatom state needs dimension >= 2");
  CollectivePopulations c;
  c.ground = rho.population(0);
  const Vector w = w_state(n);
  c.bright = (w.adjoint() * rho.matrix() * w)(0, 0).real();
  double sites = 0.0;
  for (long i = 1; i <= n; ++i) sites += rho.population(i);
  c.dark = sites - c.bright;
  return c;
}

double absorption_fidelity(const DensityMatrix& rho) { return 1.0 - rho.population(0); }

double default_horizon(const SuperatomParams& p) {
  const double on = std::abs(collective_rabi(p));
  const double g = p.gamma;
  double slowest = on;
  // overdamped relaxation runs at about half of Omega_N^2 / gamma
  if (g > 0.0) slowest = std::min({g, 0.5 * on * on / g, on});
  if (!(slowest > 0.0)) throw ValidationError("default horizon needs Omega_N > 0 and gamma > 0");
  return 20.0 / slowest;
}

AbsorptionTrace simulate_absorption(const SuperatomParams& p, double t_max, std::size_t samples, double tol) {
  if (!(t_max > 0.0)) throw ValidationError("t_max must be positive");
  if (samples < 2) throw ValidationError("need at least 2 samples");
  const SuperatomModel m = build_model(p);
  const LindbladGenerator gen = m.generator();
  const std::vector<double> grid = linspace(0.0, t_max, samples);
  EvolveOptions opt;
  opt.tol = tol;
  const auto states = evolve(DensityMatrix::basis(m.dim(), 0), gen, grid, opt);

  AbsorptionTrace tr;
  tr.ground.label = "rho_gg";
  tr.bright.label = "rho_ww";
  tr.dark.label = "dark";
  tr.ground.times = tr.bright.times = tr.dark.times = grid;
  for (const auto& s : states) {
    const CollectivePopulations c = collective_populations(s);
    tr.ground.values.push_back(c.ground);
    tr.bright.values.push_back(c.bright);
    tr.dark.values.push_back(c.dark);
  }
  return tr;
}

}  // namespace superatom::model
