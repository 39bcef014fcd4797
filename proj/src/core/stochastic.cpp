#include "superatom/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "superatom/kernels.hpp"
#include "superatom/lindblad.hpp"
#include "superatom/parallel.hpp"

namespace superatom {
namespace {

constexpr std::size_t kChunkSize = 8;    // members summed sequentially per task
constexpr std::size_t kWaveChunks = 32;  // chunks in flight at once
constexpr double kMaxStepPhase = 0.05;  // dt * max(gamma, Rabi) bound

long site_index(const Operator& p, std::size_t which) {
  const long d = p.dim();
  long site = -1;
  for (long c = 0; c < d; ++c)
    for (long r = 0; r < d; ++r) {
      const Complex v = p.matrix(r, c);
      if (v == Complex(0.0, 0.0)) continue;
      if (r != c || std::abs(v - Complex(1.0, 0.0)) > 1e-12 || site >= 0)
        throw ValidationError("site projector " + std::to_string(which) +
                              " must be a rank-1 projector onto a basis state");
      site = r;
    }
  if (site < 0) throw ValidationError("site projector " + std::to_string(which) + " is zero");
  return site;
}

Matrix propagator(const Eigen::SelfAdjointEigenSolver<Matrix>& es, double h) {
  const auto& lam = es.eigenvalues();
  Vector phases(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k) phases[k] = std::polar(1.0, -lam[k] * h);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void NoiseSpec::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ValidationError("noise gamma must be finite and >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("noise dt must be > 0");
  if (ensemble_size < 1) throw ValidationError("ensemble size must be >= 1");
  if (n_sites < 0) throw ValidationError("n_sites must be >= 0");
}

NoiseCalibration calibrate_noise(const Operator& hamiltonian, const std::vector<Operator>& site_projectors,
                                 const NoiseSpec& noise) {
  noise.validate();
  const long d = hamiltonian.dim();
  if (static_cast<long>(site_projectors.size()) != noise.n_sites)
    throw ValidationError("noise n_sites = " + std::to_string(noise.n_sites) + " but " +
                          std::to_string(site_projectors.size()) + " site projectors given");
  std::vector<long> sites;
  std::vector<bool> is_site(d, false);
  for (std::size_t k = 0; k < site_projectors.size(); ++k) {
    if (site_projectors[k].dim() != d) throw DimensionError("site projector " + std::to_string(k), d, site_projectors[k].dim());
    sites.push_back(site_index(site_projectors[k], k));
    if (is_site[sites.back()]) throw ValidationError("two site projectors address the same basis state");
    is_site[sites.back()] = true;
  }

  Eigen::SelfAdjointEigenSolver<Matrix> hs(hamiltonian.matrix, Eigen::EigenvaluesOnly);
  const double rabi = hs.eigenvalues().cwiseAbs().maxCoeff() * 2.0;
  if (noise.dt * std::max(noise.gamma, rabi) > kMaxStepPhase * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "noise dt = " << noise.dt << " too coarse: need dt <= " << kMaxStepPhase
        << " / max(gamma, Rabi frequency) = " << kMaxStepPhase / std::max(noise.gamma, rabi);
    throw ValidationError(msg.str());
  }

  NoiseCalibration cal;
  if (sites.empty() || noise.gamma == 0.0) return cal;

  // Decay rates straight from the dissipator the noise is meant to unravel.
  const LindbladGenerator dissipator(Operator::hamiltonian(Matrix::Zero(d, d)), site_projectors, noise.gamma);
  auto decay_of = [&](long row, long col) {
    Matrix x = Matrix::Zero(d, d);
    x(row, col) = 1.0;
    const Matrix lx = dissipator.apply(x);
    return -lx(row, col).real();
  };
  const auto other = std::find(is_site.begin(), is_site.end(), false);
  if (other != is_site.end()) cal.site_coherence_rate = decay_of(other - is_site.begin(), sites[0]);
  if (sites.size() >= 2) cal.pair_coherence_rate = decay_of(sites[0], sites[1]);

  // <exp(i phi)> = exp(-var/2) per kick for site-vs-other coherences and
  // exp(-var) for site-vs-site ones.
  if (other != is_site.end())
    cal.phase_variance = 2.0 * cal.site_coherence_rate * noise.dt;
  else
    cal.phase_variance = cal.pair_coherence_rate * noise.dt;

  if (sites.size() >= 2 && other != is_site.end()) {
    const double predicted = cal.phase_variance / noise.dt;
    if (std::abs(predicted - cal.pair_coherence_rate) > 1e-10 * std::max(1.0, cal.pair_coherence_rate)) {
      std::ostringstream msg;
      msg << "noise calibration failed: independent site phases give pair dephasing " << predicted
          << " but the generator has " << cal.pair_coherence_rate;
      throw NumericalError(msg.str());
    }
  }
  if (!(cal.phase_variance >= 0.0)) throw NumericalError("noise calibration produced a negative variance");
  return cal;
}

StochasticResult stochastic_evolve(const DensityMatrix& rho0, const Operator& hamiltonian,
                                   const std::vector<Operator>& site_projectors, const NoiseSpec& noise,
                                   const std::vector<double>& t_grid) {
  const long d = rho0.dim();
  if (hamiltonian.dim() != d) throw DimensionError("Hamiltonian " + hamiltonian.name, d, hamiltonian.dim());
  if (!hamiltonian.hermitian) throw ValidationError("Hamiltonian must be Hermitian");
  if (t_grid.empty()) throw ValidationError("time grid is empty");
  for (std::size_t k = 1; k < t_grid.size(); ++k)
    if (!(t_grid[k] > t_grid[k - 1])) throw ValidationError("time grid must be strictly increasing");

  StochasticResult result;
  result.calibration = calibrate_noise(hamiltonian, site_projectors, noise);
  const double sigma = std::sqrt(result.calibration.phase_variance);
  std::vector<long> sites;
  for (std::size_t k = 0; k < site_projectors.size(); ++k) sites.push_back(site_index(site_projectors[k], k));

  // rho0 = sum_k w_k |psi_k><psi_k|; every component sees the same noise.
  Eigen::SelfAdjointEigenSolver<Matrix> rs(0.5 * (rho0.matrix() + rho0.matrix().adjoint()));
  std::vector<double> weights;
  std::vector<Vector> components;
  for (long k = d - 1; k >= 0; --k) {
    if (rs.eigenvalues()[k] <= 1e-14) continue;
    weights.push_back(rs.eigenvalues()[k]);
    components.push_back(rs.eigenvectors().col(k));
  }

  const Eigen::SelfAdjointEigenSolver<Matrix> hs(hamiltonian.matrix);
  const Matrix half = propagator(hs, 0.5 * noise.dt);
  const auto matvec = kernels::active().matvec;
  const std::size_t n_times = t_grid.size();
  const std::size_t members = static_cast<std::size_t>(noise.ensemble_size);

  // Members are grouped into fixed chunks summed in member order, and chunk
  // sums are added in chunk order, so the worker count never shows up in
  // the result. Only one wave of chunk accumulators is alive at a time.
  struct Accumulator {
    std::vector<Matrix> states;
    std::vector<double> pop, pop_sq;
  };
  auto run_member = [&](std::size_t m, Accumulator& acc) {
    std::mt19937_64 rng(splitmix64(noise.seed ^ static_cast<std::uint64_t>(m)));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Vector> psi = components;
    Vector tmp(d);
    Matrix rho(d, d);
    auto record = [&](std::size_t slot) {
      rho.setZero();
      for (std::size_t k = 0; k < psi.size(); ++k) rho.noalias() += weights[k] * psi[k] * psi[k].adjoint();
      acc.states[slot] += rho;
      const double p = rho(0, 0).real();
      acc.pop[slot] += p;
      acc.pop_sq[slot] += p * p;
    };
    auto step = [&](const Matrix& u_half, double phase_sigma) {
      for (auto& v : psi) {
        matvec(static_cast<std::size_t>(d), u_half.data(), v.data(), tmp.data());
        v.swap(tmp);
      }
      for (long s : sites) {
        const Complex kick = std::polar(1.0, -phase_sigma * normal(rng));
        for (auto& v : psi) v[s] *= kick;
      }
      for (auto& v : psi) {
        matvec(static_cast<std::size_t>(d), u_half.data(), v.data(), tmp.data());
        v.swap(tmp);
      }
    };
    record(0);
    double t = t_grid.front();
    for (std::size_t g = 1; g < n_times; ++g) {
      const double target = t_grid[g];
      while (target - t > 1e-9 * noise.dt) {
        const double h = std::min(noise.dt, target - t);
        if (h < noise.dt) {
          step(propagator(hs, 0.5 * h), sigma * std::sqrt(h / noise.dt));
          t = target;
        } else {
          step(half, sigma);
          t += h;
        }
      }
      t = target;
      record(g);
    }
  };

  std::vector<Matrix> sum(n_times, Matrix::Zero(d, d));
  std::vector<double> g_sum(n_times, 0.0), g_sq(n_times, 0.0);
  const std::size_t chunks = (members + kChunkSize - 1) / kChunkSize;
  std::vector<Accumulator> wave(kWaveChunks);
  for (std::size_t first = 0; first < chunks; first += kWaveChunks) {
    const std::size_t count = std::min(kWaveChunks, chunks - first);
    parallel_for(count, [&](std::size_t i) {
      Accumulator& acc = wave[i];
      acc.states.assign(n_times, Matrix::Zero(d, d));
      acc.pop.assign(n_times, 0.0);
      acc.pop_sq.assign(n_times, 0.0);
      const std::size_t lo = (first + i) * kChunkSize, hi = std::min(members, lo + kChunkSize);
      for (std::size_t m = lo; m < hi; ++m) run_member(m, acc);
    });
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t g = 0; g < n_times; ++g) {
        sum[g] += wave[i].states[g];
        g_sum[g] += wave[i].pop[g];
        g_sq[g] += wave[i].pop_sq[g];
      }
  }

  const double inv_m = 1.0 / static_cast<double>(members);
  result.times = t_grid;
  result.ground_population.label = "rho_00";
  result.ground_population.times = t_grid;
  for (std::size_t g = 0; g < n_times; ++g) {
    Matrix mean = sum[g] * inv_m;
    mean = 0.5 * (mean + mean.adjoint());
    result.mean_states.push_back(DensityMatrix::unchecked(std::move(mean)));
    const double mu = g_sum[g] * inv_m;
    result.ground_population.values.push_back(mu);
    const double var = members > 1 ? std::max(0.0, (g_sq[g] - members * mu * mu) / (members - 1.0)) : 0.0;
    result.ground_stderr.push_back(std::sqrt(var * inv_m));
  }
  return result;
}

}  // namespace superatom
