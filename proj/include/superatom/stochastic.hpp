#pragma once

#include <cstdint>
#include <vector>

#include "superatom/density_matrix.hpp"

namespace superatom {

// White-noise site detunings <D_i(t) D_j(t')> ~ gamma delta_ij delta(t - t').
struct NoiseSpec {
  double gamma = 0.0;
  long n_sites = 0;
  std::uint64_t seed = 0;
  double dt = 0.0;
  long ensemble_size = 1;

  void validate() const;
};

// Outcome of matching the noise model to the dephasing generator it unravels.
struct NoiseCalibration {
  double site_coherence_rate = 0.0;  // generator decay rate of |other><site|
  double pair_coherence_rate = 0.0;  // generator decay rate of |site_a><site_b|
  double phase_variance = 0.0;       // variance of each per-step phase kick
};

// Reads the coherence decay rates of `rate * sum_i D[P_i]` off the Lindblad
// generator and fixes the per-step phase variance so that the ensemble
// average reproduces them. Throws NumericalError if independent site phases
// cannot reproduce the generator or dt is too coarse.
NoiseCalibration calibrate_noise(const Operator& hamiltonian, const std::vector<Operator>& site_projectors,
                                 const NoiseSpec& noise);

struct StochasticResult {
  std::vector<double> times;
  std::vector<DensityMatrix> mean_states;
  TimeSeries ground_population;        // ensemble mean of rho_00
  std::vector<double> ground_stderr;   // standard error of that mean
  NoiseCalibration calibration;
};

// Strang-split unraveling: half coherent step, exact diagonal phase kick
// exp(-i phi_i |i><i|) per site, half coherent step. Realization m draws from
// a generator seeded with splitmix64(seed ^ m), and members are summed in
// index order, so results do not depend on the worker count.
StochasticResult stochastic_evolve(const DensityMatrix& rho0, const Operator& hamiltonian,
                                   const std::vector<Operator>& site_projectors, const NoiseSpec& noise,
                                   const std::vector<double>& t_grid);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace superatom
