#include <cmath>

#include "superatom/photon_channel.hpp"

namespace superatom::photon {
namespace {

// branch[j] holds the unnormalized field given exactly j cells fired so far.
CascadeResult collect(const std::vector<Matrix>& branch, long k) {
  CascadeResult r;
  r.k = k;
  for (long j = 0; j <= k; ++j) {
    const double p = branch[j].trace().real();
    r.fired_distribution.push_back(p);
    if (p > kVacuumCertain)
      r.conditional_outputs.emplace(
          j, FockField(DensityMatrix(branch[j] / p, StateTolerances{1e-10, 1e-9, -1e-9})));
  }
  return r;
}

}  // namespace

CascadeResult cascade(const FockField& field, long k) {
  if (k < 1) throw ValidationError("cascade needs k >= 1 cells");
  const long f = field.n_max() + 1;
  std::vector<Matrix> branch(k + 1, Matrix::Zero(f, f));
  branch[0] = field.rho().matrix();
  for (long cell = 0; cell < k; ++cell) {
    std::vector<Matrix> next(k + 1, Matrix::Zero(f, f));
    for (long j = 0; j <= cell; ++j) {
      const Branches b = subtraction_branches(branch[j]);
      next[j] += b.no_fire;
      next[j + 1] += b.fired;
    }
    branch.swap(next);
  }
  return collect(branch, k);
}

CascadeResult cascade_finite_time(const FockField& field, long k, double gamma_eff, double t_cell, double tol) {
  if (k < 1) throw ValidationError("cascade needs k >= 1 cells");
  if (!(t_cell > 0.0)) throw ValidationError("cell interaction time must be positive");
  const long f = field.n_max() + 1;
  std::vector<Matrix> branch(k + 1, Matrix::Zero(f, f));
  branch[0] = field.rho().matrix();
  for (long cell = 0; cell < k; ++cell) {
    std::vector<Matrix> next(k + 1, Matrix::Zero(f, f));
    for (long j = 0; j <= cell; ++j) {
      const double w = branch[j].trace().real();
      if (w <= kVacuumCertain) continue;
      Matrix joint = Matrix::Zero(2 * f, 2 * f);
      joint.topLeftCorner(f, f) = branch[j] / w;
      const JointCellField start(DensityMatrix::unchecked(std::move(joint)), field.n_max());
      const JointCellField end = evolve_channel(start, gamma_eff, {0.0, t_cell}, tol).back();
      next[j] += w * end.block(Cell::ground);
      next[j + 1] += w * end.block(Cell::excited);
    }
    branch.swap(next);
  }
  return collect(branch, k);
}

}  // namespace superatom::photon
