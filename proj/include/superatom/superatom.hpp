#pragma once

#include <optional>
#include <string>
#include <vector>

#include "superatom/density_matrix.hpp"
#include "superatom/lindblad.hpp"

namespace superatom::model {

// Angular frequencies throughout (hbar = 1). Time comes out in the inverse
// of whatever frequency unit the caller uses.
struct SuperatomParams {
  long n_atoms = 1;
  double omega_p = 0.0;  // probe Rabi frequency
  double omega_c = 0.0;  // coupling Rabi frequency
  double delta_c = 0.0;  // coupling detuning
  double gamma = 0.0;    // inhomogeneous dephasing rate

  // C6 / hbar in (angular frequency) * length^6; sets the blockade-radius length unit.
  std::optional<double> c6;
  // Gaussian units: dipole in statC*cm, mode area in cm^2, probe optical
  // frequency in rad/s (paired with gamma, omega_c, delta_c in rad/s).
  std::optional<double> dipole;
  std::optional<double> mode_area;
  std::optional<double> omega_probe;

  // Throws ValidationError on violated invariants.
  void validate() const;
  // Non-fatal validity notes (adiabatic elimination needs delta_c >> omega_c).
  std::vector<std::string> warnings() const;

  // Parameters with collective Rabi frequency 1 and gamma = ratio, so that
  // time is measured in units of 1/Omega_N.
  static SuperatomParams dimensionless(long n_atoms, double gamma_over_omega_n);
};

inline constexpr double kSpeedOfLightCgs = 2.99792458e10;  // cm/s
inline constexpr double kHbarCgs = 1.054571817e-27;        // erg*s
inline constexpr double kDipoleSiToCgs = 2.99792458e11;    // C*m -> statC*cm

double two_photon_rabi(const SuperatomParams& p);
double collective_rabi(const SuperatomParams& p);
double blockade_radius(const SuperatomParams& p);
// gaussian: dipole, mode_area and omega_probe as documented above.
// natural: hbar = c = 1, all inputs in one consistent unit system.
enum class Units { gaussian, natural };
double optical_thickness(const SuperatomParams& p, Units units = Units::gaussian);

// Site basis {|G>, |1>, ..., |N>}; index 0 is the ground state.
struct SuperatomModel {
  long n_atoms = 0;
  Operator hamiltonian;
  std::vector<Operator> jump_operators;
  double rate = 0.0;
  std::vector<std::string> basis_labels;

  long dim() const { return n_atoms + 1; }
  LindbladGenerator generator() const { return LindbladGenerator(hamiltonian, jump_operators, rate); }
};

SuperatomModel build_model(const SuperatomParams& p);

// |W> = sum_i |i>/sqrt(N) in the site basis.
Vector w_state(long n_atoms);
// Projector onto the N-1 dark states (site span minus |W>).
Matrix dark_projector(long n_atoms);

struct CollectivePopulations {
  double ground = 0.0;
  double bright = 0.0;  // <W|rho|W>
  double dark = 0.0;
};
CollectivePopulations collective_populations(const DensityMatrix& rho);

double absorption_fidelity(const DensityMatrix& rho);

struct AbsorptionTrace {
  TimeSeries ground;  // rho_GG(t)
  TimeSeries bright;
  TimeSeries dark;
};

// Starts from |G><G| and samples `samples` equally spaced times in [0, t_max].
AbsorptionTrace simulate_absorption(const SuperatomParams& p, double t_max, std::size_t samples,
                                    double tol = 1e-8);

// 20 / min(gamma, Omega_N^2/gamma, Omega_N), long enough to equilibrate in all regimes.
double default_horizon(const SuperatomParams& p);

enum class Regime { underdamped, crossover, overdamped };
std::string to_string(Regime r);

struct GammaEffFit {
  double gamma_eff = 0.0;
  double fit_residual = 0.0;  // RMS residual of log-deviation
  Regime regime = Regime::overdamped;
  long zero_crossings = 0;
  long envelope_points = 0;
  bool used_envelope = false;
};

struct FitOptions {
  // Deviations below this fraction of the initial one are treated as zero
  // when counting crossings and are excluded from the fit.
  double noise_floor = 1e-6;
  // Overdamped/tail fits use samples with deviation below this fraction.
  double tail_start = 0.5;
  // Series must decay below this fraction to count as equilibrated.
  double settled_fraction = 0.01;
};

GammaEffFit fit_gamma_eff(const TimeSeries& series, long n_atoms, const FitOptions& options = {});

struct SweepRow {
  double omega_n_over_gamma = 0.0;
  double gamma_eff = 0.0;
  double gamma_eff_over_gamma = 0.0;
  double gamma_eff_gamma_over_omega_n2 = 0.0;
  double fit_residual = 0.0;
  Regime regime = Regime::overdamped;
  long zero_crossings = 0;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  // Geometric midpoint of the first overdamped -> underdamped flip, if any.
  std::optional<double> transition_ratio;
};

struct SweepOptions {
  std::size_t min_samples = 4000;
  double samples_per_period = 40.0;
  double tol = 1e-8;
};

// Varies gamma at fixed Omega_N (taken from p).
SweepTable sweep_gamma_eff(const SuperatomParams& p, const std::vector<double>& omega_n_over_gamma,
                           const SweepOptions& options = {});

SweepRow gamma_eff_point(const SuperatomParams& p, double omega_n_over_gamma, const SweepOptions& options = {});

// Bisects (in log ratio) for the smallest Omega_N/Gamma classified underdamped.
double locate_regime_transition(const SuperatomParams& p, double lo, double hi, int iterations = 12,
                                const SweepOptions& options = {});

std::vector<double> log_spaced(double lo, double hi, std::size_t count);

}  // namespace superatom::model
