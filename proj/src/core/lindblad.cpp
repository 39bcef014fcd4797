#include "superatom/lindblad.hpp"

#include <algorithm>
#include <cmath>

#include "superatom/kernels.hpp"

namespace superatom {
namespace {

void matmul(const Matrix& a, const Matrix& b, Matrix& c) {
  const auto n = static_cast<std::size_t>(a.rows());
  c.resize(a.rows(), a.rows());
  kernels::active().matmul(n, a.data(), b.data(), c.data());
}

}  // namespace

LindbladGenerator::LindbladGenerator(const Operator& hamiltonian, const std::vector<Operator>& jumps, double rate)
    : dim_(hamiltonian.dim()), rate_(rate), hamiltonian_(hamiltonian.matrix) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw ValidationError("dissipation rate must be finite and >= 0");
  if (dim_ == 0) throw ValidationError("empty Hamiltonian");
  if (!hamiltonian.hermitian) throw ValidationError("Hamiltonian " + hamiltonian.name + " must be Hermitian");

  Matrix decay = Matrix::Zero(dim_, dim_);
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    const Operator& op = jumps[k];
    const std::string label = op.name.empty() ? "jump[" + std::to_string(k) + "]" : op.name;
    if (op.matrix.rows() != dim_ || op.matrix.cols() != dim_) throw DimensionError("jump operator " + label, dim_, op.matrix.rows());
    Jump j;
    j.dense = op.matrix;
    j.dense_adjoint = op.matrix.adjoint();
    long nnz = 0;
    for (Eigen::Index e = 0; e < op.matrix.size(); ++e)
      if (op.matrix.data()[e] != Complex(0.0, 0.0)) ++nnz;
    if (nnz <= 2 * dim_) {
      for (long c = 0; c < dim_; ++c)
        for (long r = 0; r < dim_; ++r)
          if (op.matrix(r, c) != Complex(0.0, 0.0)) j.entries.push_back({r, c, op.matrix(r, c)});
    }
    decay += j.dense_adjoint * j.dense;
    jumps_.push_back(std::move(j));
  }
  h_eff_ = hamiltonian_ - Complex(0.0, rate_) * decay;
  h_eff_adjoint_ = h_eff_.adjoint();

  Eigen::SelfAdjointEigenSolver<Matrix> hs(hamiltonian_, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Matrix> ds(0.5 * (decay + decay.adjoint()), Eigen::EigenvaluesOnly);
  const double h_spread = hs.eigenvalues().maxCoeff() - hs.eigenvalues().minCoeff();
  scale_ = h_spread + 2.0 * rate_ * ds.eigenvalues().cwiseAbs().maxCoeff();
}

void LindbladGenerator::add_jump_terms(const Matrix& x, Matrix& out) const {
  if (rate_ == 0.0) return;
  const double w = 2.0 * rate_;
  for (const Jump& j : jumps_) {
    if (!j.entries.empty()) {
      // (c X c^+)_{ab} = sum c_{a,p} X_{p,q} conj(c_{b,q})
      for (const SparseEntry& left : j.entries)
        for (const SparseEntry& right : j.entries)
          out(left.row, right.row) += w * left.value * x(left.col, right.col) * std::conj(right.value);
    } else {
      matmul(j.dense, x, scratch_);
      matmul(scratch_, j.dense_adjoint, scratch2_);
      out += w * scratch2_;
    }
  }
}

Matrix LindbladGenerator::apply(const Matrix& x) const {
  if (x.rows() != dim_ || x.cols() != dim_) throw DimensionError("operand", dim_, x.rows());
  Matrix left, right;
  matmul(h_eff_, x, left);
  matmul(x, h_eff_adjoint_, right);
  Matrix out = Complex(0.0, -1.0) * (left - right);
  add_jump_terms(x, out);
  return out;
}

void LindbladGenerator::apply_hermitian(const Matrix& x, Matrix& out) const {
  matmul(h_eff_, x, scratch_);
  out.resize(dim_, dim_);
  // -i (M - M^+) with M = H_eff X; X H_eff^+ = M^+ for Hermitian X.
  for (long c = 0; c < dim_; ++c) {
    for (long r = 0; r < dim_; ++r) {
      const Complex diff = scratch_(r, c) - std::conj(scratch_(c, r));
      out(r, c) = Complex(diff.imag(), -diff.real());
    }
  }
  add_jump_terms(x, out);
}

Matrix lindblad_rhs(const DensityMatrix& rho, const Operator& hamiltonian, const std::vector<Operator>& jumps,
                    double rate) {
  if (hamiltonian.dim() != rho.dim()) throw DimensionError("Hamiltonian " + hamiltonian.name, rho.dim(), hamiltonian.dim());
  LindbladGenerator gen(hamiltonian, jumps, rate);
  return gen.apply(rho.matrix());
}

}  // namespace superatom
