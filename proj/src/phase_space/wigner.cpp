#include "superatom/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "superatom/kernels.hpp"
#include "superatom/parallel.hpp"

namespace superatom::phase_space {

namespace {

void check_axis(const std::vector<double>& axis, const char* label) {
  if (axis.size() < 2) throw ValidationError(std::string(label) + " axis needs at least 2 points");
  const double step = axis[1] - axis[0];
  if (!(step > 0.0)) throw ValidationError(std::string(label) + " axis must increase");
  for (std::size_t i = 1; i < axis.size(); ++i) {
    const double d = axis[i] - axis[i - 1];
    if (!std::isfinite(axis[i]) || std::abs(d - step) > 1e-9 * std::max(1.0, std::abs(step)) * axis.size())
      throw ValidationError(std::string(label) + " axis must be uniformly spaced");
  }
}

// Composite Simpson over [a, b] with an even number of panels.
double simpson(const FockField& field, Quadrature q, double a, double b, long panels) {
  std::vector<double> pts(panels + 1);
  const double h = (b - a) / static_cast<double>(panels);
  for (long i = 0; i <= panels; ++i) pts[i] = a + h * static_cast<double>(i);
  const std::vector<double> f = quadrature_density(field, q, pts);
  double s = f.front() + f.back();
  for (long i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
  return s * h / 3.0;
}

// Probability mass of the x and p quadratures outside the axes.
double tail_mass(const FockField& field, const std::vector<double>& xs, const std::vector<double>& ps) {
  const double reach = std::sqrt(2.0 * static_cast<double>(field.n_max()) + 1.0) + 12.0;
  auto outside = [&](Quadrature q, double lo, double hi) {
    const double far_lo = std::min(lo, -reach), far_hi = std::max(hi, reach);
    double m = 0.0;
    if (far_lo < lo) m += simpson(field, q, far_lo, lo, 800);
    if (hi < far_hi) m += simpson(field, q, hi, far_hi, 800);
    return std::max(m, 0.0);
  };
  return outside(Quadrature::x, xs.front(), xs.back()) + outside(Quadrature::p, ps.front(), ps.back());
}

}  // namespace

std::vector<double> GridSpec::axis() const {
  if (points < 2) throw ValidationError("grid needs at least 2 points per axis");
  if (!(extent > 0.0)) throw ValidationError("grid extent must be positive");
  return linspace(-extent, extent, static_cast<std::size_t>(points));
}

WignerGrid wigner(const FockField& field, const std::vector<double>& x_axis, const std::vector<double>& p_axis) {
  check_axis(x_axis, "x");
  check_axis(p_axis, "p");
  const Matrix& rho = field.rho().matrix();
  const std::size_t dim = static_cast<std::size_t>(rho.rows());
  const auto& kernel = kernels::active();

  WignerGrid g;
  g.x_axis = x_axis;
  g.p_axis = p_axis;
  const std::size_t nx = x_axis.size(), np = p_axis.size();
  g.values.resize(static_cast<long>(nx), static_cast<long>(np));
  std::vector<std::vector<double>> rows(nx);
  parallel_for(nx, [&](std::size_t i) {
    std::vector<double> re(np, x_axis[i] / std::numbers::sqrt2), im(np);
    for (std::size_t j = 0; j < np; ++j) im[j] = p_axis[j] / std::numbers::sqrt2;
    rows[i].resize(np);
    kernel.wigner(dim, rho.data(), np, re.data(), im.data(), rows[i].data());
  });
  double sum = 0.0;
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < np; ++j) {
      g.values(static_cast<long>(i), static_cast<long>(j)) = rows[i][j];
      sum += rows[i][j];
    }
  g.integral = sum * g.dx() * g.dp();
  if (!std::isfinite(g.integral)) throw NumericalError("Wigner grid contains non-finite values");
  g.eps_grid = tail_mass(field, x_axis, p_axis);
  if (std::abs(g.integral - 1.0) > kNormalizationTolerance)
    throw ValidationError("Wigner grid too small: integral " + std::to_string(g.integral) +
                          " differs from 1 by more than 1%; widen the axes or refine the spacing");
  return g;
}

WignerGrid wigner(const FockField& field, const GridSpec& grid) {
  const std::vector<double> axis = grid.axis();
  return wigner(field, axis, axis);
}

double wigner_at(const FockField& field, double x, double p) {
  const Matrix& rho = field.rho().matrix();
  const double re = x / std::numbers::sqrt2, im = p / std::numbers::sqrt2;
  double out = 0.0;
  kernels::active().wigner(static_cast<std::size_t>(rho.rows()), rho.data(), 1, &re, &im, &out);
  return out;
}

double negativity_volume(const WignerGrid& grid) {
  double s = 0.0;
  for (long i = 0; i < grid.values.rows(); ++i)
    for (long j = 0; j < grid.values.cols(); ++j) s += std::max(-grid.values(i, j), 0.0);
  return s * grid.dx() * grid.dp();
}

std::vector<double> marginal(const WignerGrid& grid, Quadrature axis) {
  std::vector<double> out;
  if (axis == Quadrature::x) {
    out.resize(grid.x_axis.size());
    for (long i = 0; i < grid.values.rows(); ++i) out[i] = grid.values.row(i).sum() * grid.dp();
  } else {
    out.resize(grid.p_axis.size());
    for (long j = 0; j < grid.values.cols(); ++j) out[j] = grid.values.col(j).sum() * grid.dx();
  }
  return out;
}

}  // namespace superatom::phase_space
