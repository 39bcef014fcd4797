#pragma once

#include <string>
#include <vector>

#include "superatom/types.hpp"

namespace superatom {

// Tolerances applied when a matrix is accepted as a density matrix.
struct StateTolerances {
  double hermiticity = 1e-12;
  double trace = 1e-10;
  double min_eigenvalue = -1e-9;
};

struct InvariantReport {
  double hermiticity_error = 0.0;  // max |rho_ij - conj(rho_ji)|
  double trace_error = 0.0;        // |Tr rho - 1|
  double min_eigenvalue = 0.0;     // of the Hermitian part

  bool satisfies(const StateTolerances& tol) const {
    return hermiticity_error <= tol.hermiticity && trace_error <= tol.trace &&
           min_eigenvalue >= tol.min_eigenvalue;
  }
};

InvariantReport inspect(const Matrix& m);

// Trace-one, Hermitian, positive semidefinite operator on a finite basis.
class DensityMatrix {
 public:
  // Validates against `tol`; throws ValidationError naming the violated invariant.
  explicit DensityMatrix(Matrix elements, const StateTolerances& tol = {});

  // Skips validation. For integrators that have already checked the state.
  static DensityMatrix unchecked(Matrix elements);

  static DensityMatrix pure(const Vector& psi);  // normalizes psi
  static DensityMatrix basis(long dim, long index);
  static DensityMatrix maximally_mixed(long dim);

  long dim() const { return elements_.rows(); }
  const Matrix& matrix() const { return elements_; }
  Complex operator()(long i, long j) const { return elements_(i, j); }
  double population(long i) const { return elements_(i, i).real(); }
  double purity() const;

 private:
  struct NoCheck {};
  DensityMatrix(Matrix elements, NoCheck) : elements_(std::move(elements)) {}

  Matrix elements_;
};

// Hamiltonians carry hermitian = true; jump operators usually do not.
struct Operator {
  Matrix matrix;
  bool hermitian = false;
  std::string name;

  Operator() = default;
  Operator(Matrix m, bool is_hermitian, std::string label = {});

  long dim() const { return matrix.rows(); }

  static Operator hamiltonian(Matrix m, std::string label = "H");
  static Operator jump(Matrix m, std::string label = "c");
  static Operator projector(long dim, long index);
  static Operator transition(long dim, long to, long from);  // |to><from|
};

Complex expectation(const DensityMatrix& rho, const Operator& obs);

// (1/2) * sum of singular values of a - b.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

double max_abs(const Matrix& m);

struct TimeSeries {
  std::vector<double> times;
  std::vector<double> values;
  std::string label;

  // Throws ValidationError unless times strictly increase and sizes match.
  void validate() const;
  std::size_t size() const { return times.size(); }
};

std::vector<double> linspace(double start, double stop, std::size_t count);

}  // namespace superatom
