#include <algorithm>
#include <cmath>
#include <sstream>

#include "superatom/lindblad.hpp"

namespace superatom {
namespace {

struct ColumnEntry {
  long row;
  Complex value;
};

// Nonzeros of every column of every jump operator.
std::vector<std::vector<std::vector<ColumnEntry>>> jump_columns(const LindbladGenerator& gen) {
  const long d = gen.dim();
  std::vector<std::vector<std::vector<ColumnEntry>>> cols;
  for (const auto& j : gen.jumps()) {
    std::vector<std::vector<ColumnEntry>> per(d);
    for (long c = 0; c < d; ++c)
      for (long r = 0; r < d; ++r)
        if (j.dense(r, c) != Complex(0.0, 0.0)) per[c].push_back({r, j.dense(r, c)});
    cols.push_back(std::move(per));
  }
  return cols;
}

class LiouvillianColumns {
 public:
  explicit LiouvillianColumns(const LindbladGenerator& gen)
      : gen_(gen), d_(gen.dim()), cols_(jump_columns(gen)), y_(Matrix::Zero(d_, d_)) {}

  // Packed image L(X) for the k-th packed Hermitian basis element.
  void column(long k, double* out) {
    y_.setZero();
    const long i = k % d_;
    const long j = k / d_;
    if (i == j) {
      add(i, i, 1.0);
    } else if (i < j) {  // real part slot of (i, j)
      add(i, j, 1.0);
      add(j, i, 1.0);
    } else {  // imaginary part slot of (j, i), j < i
      add(j, i, Complex(0.0, 1.0));
      add(i, j, Complex(0.0, -1.0));
    }
    for (long c = 0; c < d_; ++c) {
      for (long r = 0; r < d_; ++r) {
        if (r == c)
          out[r + c * d_] = y_(r, r).real();
        else if (r < c)
          out[r + c * d_] = y_(r, c).real();
        else
          out[r + c * d_] = y_(c, r).imag();
      }
    }
  }

 private:
  // y += coeff * L(|a><b|)
  void add(long a, long b, Complex coeff) {
    const Matrix& he = gen_.effective_hamiltonian();
    const Complex mi(0.0, -1.0);
    for (long r = 0; r < d_; ++r) y_(r, b) += coeff * mi * he(r, a);
    for (long c = 0; c < d_; ++c) y_(a, c) -= coeff * mi * std::conj(he(c, b));
    const double w = 2.0 * gen_.rate();
    if (w == 0.0) return;
    for (const auto& per : cols_)
      for (const ColumnEntry& p : per[a])
        for (const ColumnEntry& q : per[b]) y_(p.row, q.row) += coeff * w * p.value * std::conj(q.value);
  }

  const LindbladGenerator& gen_;
  long d_;
  std::vector<std::vector<std::vector<ColumnEntry>>> cols_;
  Matrix y_;
};

DensityMatrix steady_state_by_integration(const LindbladGenerator& gen, const SteadyStateOptions& opt) {
  const long d = gen.dim();
  Matrix start = 0.5 * Matrix::Identity(d, d) / static_cast<double>(d);
  start(0, 0) += 0.5;
  DensityMatrix rho = DensityMatrix::unchecked(start);
  double chunk = gen.scale() > 0.0 ? 10.0 / gen.scale() : 1.0;
  EvolveOptions eo;
  eo.tol = 1e-12;
  Matrix rhs;
  for (int round = 0; round < 48; ++round) {
    rho = evolve(rho, gen, {0.0, chunk}, eo).back();
    gen.apply_hermitian(rho.matrix(), rhs);
    if (max_abs(rhs) < opt.residual_target) {
      Matrix m = rho.matrix();
      m /= m.trace().real();
      return DensityMatrix(std::move(m), StateTolerances{1e-10, 1e-10, -1e-9});
    }
    chunk *= 2.0;
  }
  throw NumericalError("long-time integration did not reach a stationary state");
}

}  // namespace

RealVector pack_hermitian(const Matrix& x) {
  const long d = x.rows();
  RealVector v(d * d);
  for (long c = 0; c < d; ++c)
    for (long r = 0; r < d; ++r) v[r + c * d] = r == c ? x(r, r).real() : (r < c ? x(r, c).real() : x(c, r).imag());
  return v;
}

Matrix unpack_hermitian(const RealVector& v, long d) {
  if (v.size() != d * d) throw DimensionError("packed vector", d * d, v.size());
  Matrix x(d, d);
  for (long i = 0; i < d; ++i) {
    x(i, i) = v[i + i * d];
    for (long j = i + 1; j < d; ++j) {
      x(i, j) = Complex(v[i + j * d], v[j + i * d]);
      x(j, i) = std::conj(x(i, j));
    }
  }
  return x;
}

RealMatrix hermitian_liouvillian(const LindbladGenerator& gen) {
  const long n = gen.dim() * gen.dim();
  RealMatrix out(n, n);
  LiouvillianColumns cols(gen);
  for (long k = 0; k < n; ++k) cols.column(k, out.col(k).data());
  return out;
}

long null_space_dimension(const LindbladGenerator& gen, double relative_tolerance) {
  const RealMatrix l = hermitian_liouvillian(gen);
  Eigen::BDCSVD<RealMatrix> svd(l);
  const RealVector& s = svd.singularValues();
  const double cutoff = relative_tolerance * std::max(1.0, s.size() > 0 ? s[0] : 0.0);
  return static_cast<long>((s.array() < cutoff).count());
}

DensityMatrix steady_state(const LindbladGenerator& gen, const SteadyStateOptions& opt) {
  const long d = gen.dim();
  if (d > opt.dense_dim_limit) return steady_state_by_integration(gen, opt);

  const long n = d * d;
  RealMatrix a = hermitian_liouvillian(gen);
  // The trace functional is a left null vector of L, so the equation for
  // rho_00 is redundant; swap it for Tr rho = 1.
  a.row(0).setZero();
  for (long i = 0; i < d; ++i) a(0, i + i * d) = 1.0;
  RealVector b = RealVector::Zero(n);
  b[0] = 1.0;

  Eigen::PartialPivLU<RealMatrix> lu(a);
  // The rcond estimate misses exact zero pivots, so check those directly too.
  const RealVector pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double rcond = std::min(lu.rcond(), pivots.minCoeff() / std::max(pivots.maxCoeff(), 1e-300));
  if (!(rcond > opt.degenerate_rcond)) {
    const long mult = null_space_dimension(gen, opt.null_tolerance);
    std::ostringstream msg;
    msg << "steady state is not unique: Liouvillian null space has multiplicity " << mult << " (rcond " << rcond
        << ")";
    throw NumericalError(msg.str());
  }
  RealVector v = lu.solve(b);
  v += lu.solve(b - a * v);

  Matrix x = unpack_hermitian(v, d);
  x /= x.trace().real();
  Matrix residual;
  gen.apply_hermitian(x, residual);
  if (max_abs(residual) > opt.residual_target) {
    std::ostringstream msg;
    msg << "steady-state residual " << max_abs(residual) << " exceeds " << opt.residual_target;
    throw NumericalError(msg.str());
  }
  return DensityMatrix(std::move(x), StateTolerances{1e-12, 1e-10, -1e-9});
}

DensityMatrix steady_state(const Operator& hamiltonian, const std::vector<Operator>& jumps, double rate) {
  LindbladGenerator gen(hamiltonian, jumps, rate);
  return steady_state(gen);
}

}  // namespace superatom
