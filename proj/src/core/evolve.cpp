#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "superatom/lindblad.hpp"

namespace superatom {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

bool all_finite(const Matrix& m) {
  for (Eigen::Index k = 0; k < m.size(); ++k)
    if (!std::isfinite(m.data()[k].real()) || !std::isfinite(m.data()[k].imag())) return false;
  return true;
}

[[noreturn]] void fail(const std::string& what, double t) {
  std::ostringstream msg;
  msg.precision(17);
  msg << what << " at t = " << t;
  throw NumericalError(msg.str());
}

}  // namespace

std::vector<DensityMatrix> evolve(const DensityMatrix& rho0, const LindbladGenerator& gen,
                                  const std::vector<double>& t_grid, const EvolveOptions& opt, EvolveStats* stats) {
  if (rho0.dim() != gen.dim()) throw DimensionError("initial state", gen.dim(), rho0.dim());
  if (t_grid.empty()) throw ValidationError("time grid is empty");
  for (std::size_t k = 1; k < t_grid.size(); ++k)
    if (!(t_grid[k] > t_grid[k - 1])) throw ValidationError("time grid must be strictly increasing");
  if (!(opt.tol > 0.0 && opt.tol <= 1e-3)) throw ValidationError("tolerance must lie in (0, 1e-3]");

  EvolveStats local;
  EvolveStats& st = stats ? *stats : local;

  std::vector<DensityMatrix> out;
  out.reserve(t_grid.size());
  out.push_back(rho0);

  const long d = gen.dim();
  Matrix y = rho0.matrix();
  Matrix k1(d, d), k2(d, d), k3(d, d), k4(d, d), k5(d, d), k6(d, d), k7(d, d), tmp(d, d), y_new(d, d);

  double t = t_grid.front();
  const double span = t_grid.back() - t_grid.front();
  double h = gen.scale() > 0.0 ? 0.01 / gen.scale() : span;
  if (span > 0.0) h = std::min(h, span);

  gen.apply_hermitian(y, k1);
  ++st.rhs_evaluations;

  for (std::size_t g = 1; g < t_grid.size(); ++g) {
    const double target = t_grid[g];
    while (t < target) {
      if (st.accepted + st.rejected >= opt.max_steps) fail("step budget exhausted", t);
      bool last = false;
      double step = h;
      if (t + step >= target || target - (t + step) < 1e-12 * std::abs(target)) {
        step = target - t;
        last = true;
      }
      const double min_step = opt.min_step_fraction * std::max({std::abs(t), std::abs(target), span});
      if (step < min_step && !last) fail("tolerance not achievable at minimum step size", t);

      tmp = y + step * a21 * k1;
      gen.apply_hermitian(tmp, k2);
      tmp = y + step * (a31 * k1 + a32 * k2);
      gen.apply_hermitian(tmp, k3);
      tmp = y + step * (a41 * k1 + a42 * k2 + a43 * k3);
      gen.apply_hermitian(tmp, k4);
      tmp = y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      gen.apply_hermitian(tmp, k5);
      tmp = y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      gen.apply_hermitian(tmp, k6);
      y_new = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      gen.apply_hermitian(y_new, k7);
      st.rhs_evaluations += 6;

      tmp = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double scale = std::max({max_abs(y), max_abs(y_new), 1e-12});
      const double err = max_abs(tmp) / (opt.tol * scale);
      if (!std::isfinite(err) || !all_finite(y_new)) {
        if (step <= min_step) fail("non-finite values during integration", t);
        h = 0.25 * step;
        ++st.rejected;
        continue;
      }
      if (err <= 1.0) {
        t = last ? target : t + step;
        y.swap(y_new);
        k1.swap(k7);
        ++st.accepted;
        const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        // a clipped final step says nothing about the natural step length
        if (!last || grow < 1.0) h = step * std::clamp(grow, 0.2, 5.0);
      } else {
        ++st.rejected;
        h = step * std::max(0.2, 0.9 * std::pow(err, -0.2));
        if (h < min_step) fail("tolerance not achievable at minimum step size", t);
      }
    }
    if (opt.check_invariants) {
      const InvariantReport r = inspect(y);
      if (!r.satisfies(opt.drift)) {
        std::ostringstream msg;
        msg << "state drifted out of the density-matrix set (hermiticity " << r.hermiticity_error << ", trace "
            << r.trace_error << ", min eigenvalue " << r.min_eigenvalue << ")";
        fail(msg.str(), t);
      }
    }
    out.push_back(DensityMatrix::unchecked(y));
  }
  return out;
}

std::vector<DensityMatrix> evolve(const DensityMatrix& rho0, const Operator& hamiltonian,
                                  const std::vector<Operator>& jumps, double rate, const std::vector<double>& t_grid,
                                  double tol) {
  LindbladGenerator gen(hamiltonian, jumps, rate);
  EvolveOptions opt;
  opt.tol = tol;
  return evolve(rho0, gen, t_grid, opt);
}

}  // namespace superatom
