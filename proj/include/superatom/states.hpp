#pragma once

#include <vector>

#include "superatom/photon_channel.hpp"

namespace superatom::phase_space {

using photon::FockField;

// Quadratures x = (a + a^+)/sqrt(2), p = (a - a^+)/(i sqrt(2)); vacuum
// variance 1/2 in both.
enum class Quadrature { x, p };

struct StatePrepSpec {
  enum class Kind { vacuum, fock, coherent, squeezed_coherent };

  Kind kind = Kind::vacuum;
  long n = 0;             // fock
  Complex alpha{0.0, 0.0};  // coherent, squeezed_coherent
  double w = 1.0;         // squeezed_coherent: amplitude-quadrature width factor
  long n_max = 20;

  void validate() const;

  static StatePrepSpec vacuum(long n_max = 20);
  static StatePrepSpec fock(long n, long n_max = 20);
  static StatePrepSpec coherent(Complex alpha, long n_max = 20);
  static StatePrepSpec squeezed_coherent(Complex alpha, double w, long n_max = 20);
};

// Squeezing convention: S(r) = exp(r/2 (a^2 - a^+2)) with r = -ln w, so the
// x quadrature width is multiplied by w. Applied after the displacement.
double squeeze_parameter(double w);

// Fock amplitudes of the prepared pure state (normalized on the truncated basis).
Vector prepare_ket(const StatePrepSpec& spec);

// Throws ValidationError if the truncation leak guard fails.
FockField prepare(const StatePrepSpec& spec);

struct QuadratureMoments {
  double mean_x = 0.0;
  double mean_p = 0.0;
  double var_x = 0.0;
  double var_p = 0.0;
};
QuadratureMoments quadrature_moments(const FockField& field);

// <q|rho|q> evaluated directly in the Fock basis with Hermite functions.
std::vector<double> quadrature_density(const FockField& field, Quadrature axis, const std::vector<double>& points);

// <m|D(beta)|n> for m, n < dim, from exponentiating the generator on a
// larger basis of size work_dim.
Matrix displacement(Complex beta, long dim, long work_dim);

// D(beta) rho D(beta)^+ truncated back to the field's basis.
FockField displace(const FockField& field, Complex beta, long work_dim = 0);

}  // namespace superatom::phase_space
