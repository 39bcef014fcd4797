#include <algorithm>
#include <cmath>
#include <numbers>

#include "superatom/parallel.hpp"
#include "superatom/superatom.hpp"

namespace superatom::model {
namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  LineFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - (f.intercept + f.slope * x[k]);
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::underdamped:
      return "underdamped";
    case Regime::crossover:
      return "crossover";
    case Regime::overdamped:
      return "overdamped";
  }
  return "unknown";
}

GammaEffFit fit_gamma_eff(const TimeSeries& series, long n_atoms, const FitOptions& opt) {
  series.validate();
  if (n_atoms < 1) throw ValidationError("n_atoms must be >= 1");
  const std::size_t n = series.size();
  if (n < 5) throw ValidationError("series too short: need at least 5 samples");

  const double target = 1.0 / static_cast<double>(n_atoms + 1);
  std::vector<double> dev(n);
  for (std::size_t k = 0; k < n; ++k) dev[k] = series.values[k] - target;
  const double dev0 = std::abs(dev[0]);
  if (!(dev0 > 0.0)) throw ValidationError("series starts at the stationary value; nothing to fit");

  // Settled: the last 5% of the trace stays within settled_fraction of dev0.
  double tail_max = 0.0;
  for (std::size_t k = n - std::max<std::size_t>(1, n / 20); k < n; ++k) tail_max = std::max(tail_max, std::abs(dev[k]));
  if (tail_max > opt.settled_fraction * dev0)
    throw ValidationError("series too short: final deviation is " + std::to_string(tail_max / dev0) +
                          " of the initial one (need < " + std::to_string(opt.settled_fraction) + ")");

  GammaEffFit fit;
  const double floor = opt.noise_floor * dev0;
  int last_sign = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(dev[k]) <= floor) continue;
    const int s = dev[k] > 0 ? 1 : -1;
    if (last_sign != 0 && s != last_sign) ++fit.zero_crossings;
    last_sign = s;
  }
  fit.regime = fit.zero_crossings == 0 ? Regime::overdamped
               : fit.zero_crossings == 1 ? Regime::crossover
                                         : Regime::underdamped;

  const double fit_floor = 10.0 * floor;
  std::vector<double> xs, ys;
  if (fit.regime != Regime::overdamped) {
    for (std::size_t k = 1; k + 1 < n; ++k) {
      const double a = std::abs(dev[k - 1]), b = std::abs(dev[k]), c = std::abs(dev[k + 1]);
      if (!(b >= a && b > c) || b <= fit_floor) continue;
      // parabolic refinement of the peak
      const double h = series.times[k + 1] - series.times[k];
      const double curv = a - 2.0 * b + c;
      double offset = 0.0, peak = b;
      if (curv < 0.0) {
        offset = 0.5 * (a - c) / curv;
        peak = b - 0.25 * (a - c) * offset;
      }
      xs.push_back(series.times[k] + offset * h);
      ys.push_back(std::log(peak));
    }
  }
  if (xs.size() >= 3) {
    fit.used_envelope = true;
  } else {
    xs.clear();
    ys.clear();
    for (std::size_t k = 0; k < n; ++k) {
      const double a = std::abs(dev[k]);
      if (a > fit_floor && a <= opt.tail_start * dev0) {
        xs.push_back(series.times[k]);
        ys.push_back(std::log(a));
      }
    }
    if (xs.size() < 3) throw ValidationError("envelope extraction failed: fewer than 3 usable points");
  }
  fit.envelope_points = static_cast<long>(xs.size());
  const LineFit lf = least_squares(xs, ys);
  fit.gamma_eff = -lf.slope;
  fit.fit_residual = lf.rms;
  if (!(fit.gamma_eff > 0.0)) throw NumericalError("fitted effective rate is not positive");
  return fit;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi > 0.0)) throw ValidationError("log-spaced grid needs positive bounds");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t k = 0; k < count; ++k)
    out[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

SweepRow gamma_eff_point(const SuperatomParams& p, double ratio, const SweepOptions& opt) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) throw ValidationError("Omega_N/Gamma ratios must be positive");
  const double omega_n = collective_rabi(p);
  if (!(omega_n > 0.0)) throw ValidationError("sweep needs Omega_N > 0");
  SuperatomParams q = p;
  q.gamma = omega_n / ratio;
  const double t_max = default_horizon(q);
  const double periods = t_max * omega_n / (2.0 * std::numbers::pi);
  const std::size_t samples =
      std::max(opt.min_samples, static_cast<std::size_t>(std::ceil(opt.samples_per_period * periods))) + 1;
  const AbsorptionTrace tr = simulate_absorption(q, t_max, samples, opt.tol);
  const GammaEffFit fit = fit_gamma_eff(tr.ground, p.n_atoms);

  SweepRow row;
  row.omega_n_over_gamma = ratio;
  row.gamma_eff = fit.gamma_eff;
  row.gamma_eff_over_gamma = fit.gamma_eff / q.gamma;
  row.gamma_eff_gamma_over_omega_n2 = fit.gamma_eff * q.gamma / (omega_n * omega_n);
  row.fit_residual = fit.fit_residual;
  row.regime = fit.regime;
  row.zero_crossings = fit.zero_crossings;
  return row;
}

SweepTable sweep_gamma_eff(const SuperatomParams& p, const std::vector<double>& ratios, const SweepOptions& opt) {
  if (ratios.empty()) throw ValidationError("ratio list is empty");
  for (double r : ratios)
    if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("Omega_N/Gamma ratios must be positive");
  SweepTable table;
  table.rows.resize(ratios.size());
  parallel_for(ratios.size(), [&](std::size_t i) { table.rows[i] = gamma_eff_point(p, ratios[i], opt); });

  std::vector<std::size_t> order(ratios.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ratios[a] < ratios[b]; });
  std::optional<std::size_t> last_over;
  for (std::size_t idx : order) {
    const SweepRow& row = table.rows[idx];
    if (row.regime == Regime::overdamped) last_over = idx;
    if (row.regime == Regime::underdamped && last_over) {
      table.transition_ratio = std::sqrt(table.rows[*last_over].omega_n_over_gamma * row.omega_n_over_gamma);
      break;
    }
  }
  return table;
}

double locate_regime_transition(const SuperatomParams& p, double lo, double hi, int iterations,
                                const SweepOptions& opt) {
  if (!(lo > 0.0 && hi > lo)) throw ValidationError("transition bracket must satisfy 0 < lo < hi");
  if (gamma_eff_point(p, lo, opt).regime == Regime::underdamped)
    throw NumericalError("lower bracket is already underdamped");
  if (gamma_eff_point(p, hi, opt).regime != Regime::underdamped)
    throw NumericalError("upper bracket is not underdamped");
  for (int it = 0; it < iterations; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (gamma_eff_point(p, mid, opt).regime == Regime::underdamped)
      hi = mid;
    else
      lo = mid;
  }
  return std::sqrt(lo * hi);
}

}  // namespace superatom::model
