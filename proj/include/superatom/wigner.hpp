#pragma once

#include <vector>

#include "superatom/states.hpp"

namespace superatom::phase_space {

// W(x, p) with integral 1 over dx dp; values(i, j) = W(x_axis[i], p_axis[j]).
struct WignerGrid {
  std::vector<double> x_axis;
  std::vector<double> p_axis;
  RealMatrix values;
  double integral = 0.0;  // Riemann sum over the grid
  double eps_grid = 0.0;  // quadrature probability mass outside the axes

  double dx() const { return x_axis.size() > 1 ? x_axis[1] - x_axis[0] : 0.0; }
  double dp() const { return p_axis.size() > 1 ? p_axis[1] - p_axis[0] : 0.0; }
};

struct GridSpec {
  double extent = 6.0;
  long points = 201;

  std::vector<double> axis() const;
};

// Fraction the Riemann sum may miss 1 before the grid counts as too small.
inline constexpr double kNormalizationTolerance = 0.01;

// Axes must be uniformly spaced with at least 2 points. Throws
// ValidationError if the normalization misses 1 by more than 1%.
WignerGrid wigner(const FockField& field, const std::vector<double>& x_axis, const std::vector<double>& p_axis);
WignerGrid wigner(const FockField& field, const GridSpec& grid = {});

// Single point, same kernel.
double wigner_at(const FockField& field, double x, double p);

// sum of |min(W, 0)| dx dp.
double negativity_volume(const WignerGrid& grid);

// Integrates W over the other quadrature; returns one density value per axis point.
std::vector<double> marginal(const WignerGrid& grid, Quadrature axis);

}  // namespace superatom::phase_space
