#pragma once

#include <vector>

#include "superatom/density_matrix.hpp"

namespace superatom {

// Generator of
//   d rho/dt = -i[H, rho] + rate * sum_k (2 c_k rho c_k^+ - c_k^+ c_k rho - rho c_k^+ c_k)
// with hbar = 1. Coherent and anticommutator parts are folded into
// H_eff = H - i rate sum_k c_k^+ c_k; jumps with few nonzeros are applied
// sparsely. Holds scratch buffers: use one instance per thread.
class LindbladGenerator {
 public:
  LindbladGenerator(const Operator& hamiltonian, const std::vector<Operator>& jumps, double rate);

  long dim() const { return dim_; }
  double rate() const { return rate_; }
  const Matrix& hamiltonian() const { return hamiltonian_; }
  const Matrix& effective_hamiltonian() const { return h_eff_; }

  // Any operator X (need not be Hermitian).
  Matrix apply(const Matrix& x) const;

  // Fast path for Hermitian X: one matrix product, result exactly Hermitian.
  void apply_hermitian(const Matrix& x, Matrix& out) const;

  // Largest magnitude rate in the generator; sets the initial step scale.
  double scale() const { return scale_; }

  struct SparseEntry {
    long row;
    long col;
    Complex value;
  };
  struct Jump {
    Matrix dense;
    Matrix dense_adjoint;
    std::vector<SparseEntry> entries;  // non-empty => sparse application
  };
  const std::vector<Jump>& jumps() const { return jumps_; }

 private:
  void add_jump_terms(const Matrix& x, Matrix& out) const;

  long dim_ = 0;
  double rate_ = 0.0;
  double scale_ = 0.0;
  Matrix hamiltonian_;
  Matrix h_eff_;
  Matrix h_eff_adjoint_;
  std::vector<Jump> jumps_;
  mutable Matrix scratch_;
  mutable Matrix scratch2_;
};

Matrix lindblad_rhs(const DensityMatrix& rho, const Operator& hamiltonian, const std::vector<Operator>& jumps,
                    double rate);

struct EvolveOptions {
  double tol = 1e-8;              // relative, on the max-abs element
  double min_step_fraction = 1e-13;
  long max_steps = 50'000'000;
  bool check_invariants = true;
  StateTolerances drift{1e-10, 1e-10, -1e-9};
};

struct EvolveStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evaluations = 0;
};

// Adaptive Dormand-Prince 5(4). rho0 is the state at t_grid.front(); the
// returned vector holds one state per grid point.
std::vector<DensityMatrix> evolve(const DensityMatrix& rho0, const LindbladGenerator& generator,
                                  const std::vector<double>& t_grid, const EvolveOptions& options = {},
                                  EvolveStats* stats = nullptr);

std::vector<DensityMatrix> evolve(const DensityMatrix& rho0, const Operator& hamiltonian,
                                  const std::vector<Operator>& jumps, double rate, const std::vector<double>& t_grid,
                                  double tol = 1e-8);

struct SteadyStateOptions {
  long dense_dim_limit = 60;       // above this, fall back to long-time integration
  double degenerate_rcond = 1e-12; // bordered system treated as singular below this
  double null_tolerance = 1e-10;   // singular values counted as zero (relative)
  double residual_target = 1e-10;  // max-abs of L(rho) accepted
};

// Unique stationary state. Throws NumericalError if the null space is
// degenerate; the message reports the multiplicity.
DensityMatrix steady_state(const LindbladGenerator& generator, const SteadyStateOptions& options = {});
DensityMatrix steady_state(const Operator& hamiltonian, const std::vector<Operator>& jumps, double rate);

// Real representation of the Liouvillian on Hermitian operators. Hermitian
// X is packed as x_ii -> v[i + i d], and for i < j: Re x_ij -> v[i + j d],
// Im x_ij -> v[j + i d].
RealMatrix hermitian_liouvillian(const LindbladGenerator& generator);
RealVector pack_hermitian(const Matrix& x);
Matrix unpack_hermitian(const RealVector& v, long dim);

// Number of (near-)zero singular values of the Liouvillian.
long null_space_dimension(const LindbladGenerator& generator, double relative_tolerance = 1e-10);

}  // namespace superatom
