#include "superatom/states.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace superatom::phase_space {

void StatePrepSpec::validate() const {
  if (n_max < 1) throw ValidationError("n_max must be >= 1, got " + std::to_string(n_max));
  if (n_max > 400) throw ValidationError("n_max must be <= 400, got " + std::to_string(n_max));
  switch (kind) {
    case Kind::vacuum:
      break;
    case Kind::fock:
      if (n < 0) throw ValidationError("fock n must be >= 0");
      if (n >= n_max)
        throw ValidationError("fock n = " + std::to_string(n) + " occupies the top level of n_max = " +
                              std::to_string(n_max) + "; raise n_max");
      break;
    case Kind::squeezed_coherent:
      if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("squeeze width w must be positive and finite");
      [[fallthrough]];
    case Kind::coherent:
      if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
        throw ValidationError("alpha must be finite");
      break;
  }
}

StatePrepSpec StatePrepSpec::vacuum(long n_max) {
  StatePrepSpec s;
  s.n_max = n_max;
  return s;
}

StatePrepSpec StatePrepSpec::fock(long n, long n_max) {
  StatePrepSpec s;
  s.kind = Kind::fock;
  s.n = n;
  s.n_max = n_max;
  return s;
}

StatePrepSpec StatePrepSpec::coherent(Complex alpha, long n_max) {
  StatePrepSpec s;
  s.kind = Kind::coherent;
  s.alpha = alpha;
  s.n_max = n_max;
  return s;
}

StatePrepSpec StatePrepSpec::squeezed_coherent(Complex alpha, double w, long n_max) {
  StatePrepSpec s;
  s.kind = Kind::squeezed_coherent;
  s.alpha = alpha;
  s.w = w;
  s.n_max = n_max;
  return s;
}

double squeeze_parameter(double w) { return -std::log(w); }

Vector prepare_ket(const StatePrepSpec& spec) {
  spec.validate();
  const long dim = spec.n_max + 1;
  Vector c = Vector::Zero(dim);
  switch (spec.kind) {
    case StatePrepSpec::Kind::vacuum:
      c(0) = 1.0;
      break;
    case StatePrepSpec::Kind::fock:
      c(spec.n) = 1.0;
      break;
    case StatePrepSpec::Kind::coherent:
      c(0) = std::exp(-0.5 * std::norm(spec.alpha));
      for (long n = 1; n < dim; ++n) c(n) = c(n - 1) * spec.alpha / std::sqrt(static_cast<double>(n));
      break;
    case StatePrepSpec::Kind::squeezed_coherent: {
      // S(r) D(alpha)|0> is annihilated by a cosh r + a^+ sinh r - alpha.
      const double r = squeeze_parameter(spec.w);
      const double ch = std::cosh(r), sh = std::sinh(r);
      c(0) = 1.0;
      for (long n = 0; n + 1 < dim; ++n) {
        Complex next = spec.alpha * c(n);
        if (n > 0) next -= sh * std::sqrt(static_cast<double>(n)) * c(n - 1);
        c(n + 1) = next / (ch * std::sqrt(static_cast<double>(n + 1)));
      }
      break;
    }
  }
  const double norm = c.norm();
  if (!std::isfinite(norm) || norm <= 0.0) throw NumericalError("state amplitudes overflowed; reduce n_max or |alpha|");
  c /= norm;
  return c;
}

FockField prepare(const StatePrepSpec& spec) {
  const Vector c = prepare_ket(spec);
  DensityMatrix rho = DensityMatrix::pure(c);
  if (std::abs(rho.purity() - 1.0) > 1e-10) throw NumericalError("prepared state is not pure");
  return FockField(std::move(rho));  // applies the leak guard
}

QuadratureMoments quadrature_moments(const FockField& field) {
  const Matrix& rho = field.rho().matrix();
  const long dim = rho.rows();
  Matrix a = Matrix::Zero(dim, dim);
  for (long n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  const Matrix ad = a.adjoint();
  const double s = std::numbers::sqrt2;
  const Matrix x = (a + ad) / s;
  const Matrix p = (a - ad) / Complex(0.0, s);
  // On a truncated basis x^2 misses the top-level term of a a^+; build it
  // from the untruncated matrix elements instead.
  Matrix x2 = Matrix::Zero(dim, dim), p2 = Matrix::Zero(dim, dim);
  for (long n = 0; n < dim; ++n) {
    const double nn = static_cast<double>(n);
    x2(n, n) = nn + 0.5;
    p2(n, n) = nn + 0.5;
    if (n + 2 < dim) {
      const double v = 0.5 * std::sqrt((nn + 1.0) * (nn + 2.0));
      x2(n, n + 2) = v;
      x2(n + 2, n) = v;
      p2(n, n + 2) = -v;
      p2(n + 2, n) = -v;
    }
  }
  QuadratureMoments m;
  m.mean_x = (rho * x).trace().real();
  m.mean_p = (rho * p).trace().real();
  m.var_x = (rho * x2).trace().real() - m.mean_x * m.mean_x;
  m.var_p = (rho * p2).trace().real() - m.mean_p * m.mean_p;
  return m;
}

std::vector<double> quadrature_density(const FockField& field, Quadrature axis, const std::vector<double>& points) {
  const Matrix& rho = field.rho().matrix();
  const long dim = rho.rows();
  std::vector<double> out(points.size());
  RealVector psi(dim);
  // <p|n> = (-i)^n psi_n(p)
  Vector phase(dim);
  for (long n = 0; n < dim; ++n) {
    static const Complex kPow[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    phase(n) = axis == Quadrature::x ? Complex(1.0) : kPow[n % 4];
  }
  const double norm0 = std::pow(std::numbers::pi, -0.25);
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double q = points[k];
    psi(0) = norm0 * std::exp(-0.5 * q * q);
    if (dim > 1) psi(1) = std::numbers::sqrt2 * q * psi(0);
    for (long n = 1; n + 1 < dim; ++n) {
      const double nn = static_cast<double>(n);
      psi(n + 1) = std::sqrt(2.0 / (nn + 1.0)) * q * psi(n) - std::sqrt(nn / (nn + 1.0)) * psi(n - 1);
    }
    Vector bra(dim);
    for (long n = 0; n < dim; ++n) bra(n) = phase(n) * psi(n);
    // sum_mn <q|m> rho_mn <n|q>
    out[k] = (bra.transpose() * rho * bra.conjugate()).value().real();
  }
  return out;
}

Matrix displacement(Complex beta, long dim, long work_dim) {
  if (dim < 1) throw ValidationError("displacement dimension must be >= 1");
  if (work_dim < dim) throw ValidationError("displacement work_dim must be >= dim");
  Matrix a = Matrix::Zero(work_dim, work_dim);
  for (long n = 1; n < work_dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  // D = exp(beta a^+ - conj(beta) a) = exp(-i K) with K = i(beta a^+ - conj(beta) a) Hermitian.
  const Matrix k = Complex(0.0, 1.0) * (beta * a.adjoint() - std::conj(beta) * a);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(k);
  if (eig.info() != Eigen::Success) throw NumericalError("displacement eigensolver failed");
  Vector phases(work_dim);
  for (long i = 0; i < work_dim; ++i) phases(i) = std::exp(Complex(0.0, -eig.eigenvalues()(i)));
  const Matrix d = eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
  return d.topLeftCorner(dim, dim);
}

FockField displace(const FockField& field, Complex beta, long work_dim) {
  const long dim = field.n_max() + 1;
  if (work_dim <= 0) {
    const double b2 = std::norm(beta);
    work_dim = dim + 60 + static_cast<long>(std::ceil(8.0 * b2 + 12.0 * std::sqrt(b2 * dim)));
  }
  const Matrix full = displacement(beta, work_dim, work_dim);
  Matrix rho = Matrix::Zero(work_dim, work_dim);
  rho.topLeftCorner(dim, dim) = field.rho().matrix();
  const Matrix moved = full * rho * full.adjoint();
  Matrix cut = moved.topLeftCorner(dim, dim);
  const double kept = cut.trace().real();
  if (1.0 - kept > 1e-8) throw ValidationError("displaced state leaks out of the truncated basis; raise n_max");
  cut /= kept;
  return FockField(Matrix(0.5 * (cut + cut.adjoint())));
}

}  // namespace superatom::phase_space
