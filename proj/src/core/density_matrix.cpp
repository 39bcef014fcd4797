#include "superatom/density_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace superatom {

double max_abs(const Matrix& m) {
  double best = 0.0;
  for (Eigen::Index k = 0; k < m.size(); ++k) best = std::max(best, std::abs(m.data()[k]));
  return best;
}

InvariantReport inspect(const Matrix& m) {
  InvariantReport r;
  const long d = m.rows();
  for (long j = 0; j < d; ++j)
    for (long i = 0; i <= j; ++i)
      r.hermiticity_error = std::max(r.hermiticity_error, std::abs(m(i, j) - std::conj(m(j, i))));
  r.trace_error = std::abs(m.trace() - Complex(1.0, 0.0));
  const Matrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
  r.min_eigenvalue = d > 0 ? es.eigenvalues().minCoeff() : 0.0;
  return r;
}

DensityMatrix::DensityMatrix(Matrix elements, const StateTolerances& tol)
    : elements_(std::move(elements)) {
  if (elements_.rows() != elements_.cols() || elements_.rows() == 0)
    throw ValidationError("density matrix must be square and non-empty");
  for (Eigen::Index k = 0; k < elements_.size(); ++k)
    if (!std::isfinite(elements_.data()[k].real()) || !std::isfinite(elements_.data()[k].imag()))
      throw ValidationError("density matrix has non-finite elements");
  const InvariantReport r = inspect(elements_);
  std::ostringstream msg;
  if (r.hermiticity_error > tol.hermiticity)
    msg << "not Hermitian (max deviation " << r.hermiticity_error << ")";
  else if (r.trace_error > tol.trace)
    msg << "trace differs from 1 by " << r.trace_error;
  else if (r.min_eigenvalue < tol.min_eigenvalue)
    msg << "not positive semidefinite (min eigenvalue " << r.min_eigenvalue << ")";
  if (!msg.str().empty()) throw ValidationError("invalid density matrix: " + msg.str());
}

DensityMatrix DensityMatrix::unchecked(Matrix elements) { return DensityMatrix(std::move(elements), NoCheck{}); }

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw ValidationError("state vector has zero or non-finite norm");
  const Vector v = psi / norm;
  return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::basis(long dim, long index) {
  if (index < 0 || index >= dim) throw ValidationError("basis index out of range");
  Matrix m = Matrix::Zero(dim, dim);
  m(index, index) = 1.0;
  return DensityMatrix(std::move(m), NoCheck{});
}

DensityMatrix DensityMatrix::maximally_mixed(long dim) {
  if (dim <= 0) throw ValidationError("dimension must be positive");
  return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim), NoCheck{});
}

double DensityMatrix::purity() const {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
  return elements_.squaredNorm();
}

Operator::Operator(Matrix m, bool is_hermitian, std::string label)
    : matrix(std::move(m)), hermitian(is_hermitian), name(std::move(label)) {
  if (matrix.rows() != matrix.cols()) throw ValidationError("operator " + name + " is not square");
  if (hermitian) {
    const double dev = max_abs(matrix - matrix.adjoint());
    if (dev > 1e-12) throw ValidationError("operator " + name + " flagged Hermitian but deviates by " + std::to_string(dev));
  }
}

Operator Operator::hamiltonian(Matrix m, std::string label) { return Operator(std::move(m), true, std::move(label)); }

Operator Operator::jump(Matrix m, std::string label) { return Operator(std::move(m), false, std::move(label)); }

Operator Operator::projector(long dim, long index) {
  Matrix m = Matrix::Zero(dim, dim);
  m(index, index) = 1.0;
  return Operator(std::move(m), true, "P" + std::to_string(index));
}

Operator Operator::transition(long dim, long to, long from) {
  Matrix m = Matrix::Zero(dim, dim);
  m(to, from) = 1.0;
  return Operator(std::move(m), to == from, "|" + std::to_string(to) + "><" + std::to_string(from) + "|");
}

Complex expectation(const DensityMatrix& rho, const Operator& obs) {
  if (obs.dim() != rho.dim()) throw DimensionError("observable " + obs.name, rho.dim(), obs.dim());
  // Tr(rho A) = sum_ij rho_ij A_ji
  return (rho.matrix().transpose().array() * obs.matrix.array()).sum();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("second state", a.dim(), b.dim());
  const Matrix diff = a.matrix() - b.matrix();
  const Matrix herm = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

void TimeSeries::validate() const {
  if (times.size() != values.size())
    throw ValidationError("time series '" + label + "' has " + std::to_string(times.size()) + " times but " +
                          std::to_string(values.size()) + " values");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw ValidationError("time series '" + label + "' times not strictly increasing");
}

std::vector<double> linspace(double start, double stop, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = start;
    return out;
  }
  const double step = (stop - start) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) out[k] = start + step * static_cast<double>(k);
  out.back() = stop;
  return out;
}

}  // namespace superatom
