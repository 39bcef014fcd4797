#include <cmath>
#include <numbers>
#include <sstream>

#include "superatom/superatom.hpp"

namespace superatom::model {
namespace {

void require_positive(const std::optional<double>& v, const char* name) {
  if (v && !(*v > 0.0 && std::isfinite(*v))) throw ValidationError(std::string(name) + " must be positive when given");
}

}  // namespace

void SuperatomParams::validate() const {
  if (n_atoms < 1) throw ValidationError("n_atoms must be >= 1");
  if (!std::isfinite(omega_p) || !std::isfinite(omega_c)) throw ValidationError("Rabi frequencies must be finite");
  if (delta_c == 0.0 || !std::isfinite(delta_c)) throw ValidationError("delta_c must be finite and nonzero");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ValidationError("gamma must be finite and >= 0");
  require_positive(c6, "c6");
  require_positive(dipole, "dipole");
  require_positive(mode_area, "mode_area");
  require_positive(omega_probe, "omega_probe");
}

std::vector<std::string> SuperatomParams::warnings() const {
  std::vector<std::string> out;
  if (std::abs(delta_c) < 10.0 * std::abs(omega_c)) {
    std::ostringstream msg;
    msg << "adiabatic elimination of the intermediate level needs |delta_c| >> omega_c (|delta_c|/omega_c = "
        << std::abs(delta_c) / std::abs(omega_c) << " < 10)";
    out.push_back(msg.str());
  }
  return out;
}

SuperatomParams SuperatomParams::dimensionless(long n_atoms, double gamma_over_omega_n) {
  if (n_atoms < 1) throw ValidationError("n_atoms must be >= 1");
  SuperatomParams p;
  p.n_atoms = n_atoms;
  p.omega_c = 1.0;
  p.delta_c = 10.0;
  // Omega = omega_c omega_p / (4 delta_c) = 1/sqrt(N)  =>  Omega_N = 1
  p.omega_p = 4.0 * p.delta_c / (p.omega_c * std::sqrt(static_cast<double>(n_atoms)));
  p.gamma = gamma_over_omega_n;
  p.validate();
  return p;
}

double two_photon_rabi(const SuperatomParams& p) {
  if (p.delta_c == 0.0) throw ValidationError("delta_c must be nonzero");
  return p.omega_c * p.omega_p / (4.0 * p.delta_c);
}

double collective_rabi(const SuperatomParams& p) {
  return std::sqrt(static_cast<double>(p.n_atoms)) * two_photon_rabi(p);
}

double blockade_radius(const SuperatomParams& p) {
  if (!p.c6) throw ValidationError("blockade radius needs c6");
  const double omega = two_photon_rabi(p);
  if (!(omega > 0.0)) throw ValidationError("blockade radius needs a positive two-photon Rabi frequency");
  return std::pow(*p.c6 / (std::sqrt(static_cast<double>(p.n_atoms)) * omega), 1.0 / 6.0);
}

double optical_thickness(const SuperatomParams& p, Units units) {
  if (!p.dipole) throw ValidationError("optical thickness needs dipole");
  if (!p.mode_area) throw ValidationError("optical thickness needs mode_area");
  if (!p.omega_probe) throw ValidationError("optical thickness needs omega_probe");
  if (!(p.gamma > 0.0)) throw ValidationError("optical thickness needs gamma > 0");
  const double hbar_c = units == Units::gaussian ? kHbarCgs * kSpeedOfLightCgs : 1.0;
  const double coupling = *p.dipole * *p.dipole / (hbar_c * *p.mode_area);
  const double ratio = p.omega_c / p.delta_c;
  return 2.0 * std::numbers::pi * static_cast<double>(p.n_atoms) * coupling * (*p.omega_probe / p.gamma) * ratio * ratio;
}

}  // namespace superatom::model
