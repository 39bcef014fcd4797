#include <cmath>
#include <sstream>

#include "superatom/lindblad.hpp"
#include "superatom/photon_channel.hpp"

namespace superatom::photon {

FockField::FockField(DensityMatrix rho) : rho_(std::move(rho)) {
  const double top = rho_.population(rho_.dim() - 1);
  if (rho_.dim() >= 2 && top >= kLeakGuard) {
    std::ostringstream msg;
    msg << "Fock truncation leak: population " << top << " in |n_max = " << rho_.dim() - 1
        << "> exceeds " << kLeakGuard << "; increase n_max";
    throw ValidationError(msg.str());
  }
}

double FockField::mean_photon_number() const {
  double n = 0.0;
  for (long k = 0; k < rho_.dim(); ++k) n += static_cast<double>(k) * rho_.population(k);
  return n;
}

FockField FockField::vacuum(long n_max) { return FockField(DensityMatrix::basis(n_max + 1, 0)); }

FockField FockField::fock(long n, long n_max) {
  if (n < 0 || n >= n_max) throw ValidationError("Fock index must satisfy 0 <= n < n_max");
  return FockField(DensityMatrix::basis(n_max + 1, n));
}

JointCellField::JointCellField(DensityMatrix rho, long n_max) : rho_(std::move(rho)), n_max_(n_max) {
  if (rho_.dim() != 2 * (n_max + 1)) throw DimensionError("joint cell-field state", 2 * (n_max + 1), rho_.dim());
}

JointCellField JointCellField::ground(const FockField& field) {
  const long f = field.n_max() + 1;
  Matrix m = Matrix::Zero(2 * f, 2 * f);
  m.topLeftCorner(f, f) = field.rho().matrix();
  return JointCellField(DensityMatrix::unchecked(std::move(m)), field.n_max());
}

Matrix JointCellField::block(Cell cell) const {
  const long f = n_max_ + 1;
  const long off = static_cast<long>(cell) * f;
  return rho_.matrix().block(off, off, f, f);
}

double JointCellField::cell_probability(Cell cell) const { return block(cell).trace().real(); }

std::optional<FockField> JointCellField::conditional_field(Cell cell) const {
  Matrix b = block(cell);
  const double p = b.trace().real();
  if (p <= kVacuumCertain) return std::nullopt;
  b /= p;
  return FockField(DensityMatrix(std::move(b), StateTolerances{1e-10, 1e-9, -1e-9}));
}

Operator build_channel_generator(long n_max) {
  if (n_max < 1) throw ValidationError("n_max must be >= 1");
  const long f = n_max + 1;
  Matrix c = Matrix::Zero(2 * f, 2 * f);
  for (long n = 1; n <= n_max; ++n)
    c(JointCellField::index(Cell::excited, n - 1, n_max), JointCellField::index(Cell::ground, n, n_max)) =
        std::sqrt(static_cast<double>(n));
  if (max_abs(c * c) != 0.0) throw NumericalError("channel jump operator is not nilpotent");
  return Operator::jump(std::move(c), "a|E><G|");
}

std::vector<JointCellField> evolve_channel(const JointCellField& joint0, double gamma_eff,
                                           const std::vector<double>& t_grid, double tol) {
  if (!(gamma_eff > 0.0) || !std::isfinite(gamma_eff)) throw ValidationError("gamma_eff must be positive");
  const long d = joint0.rho().dim();
  const LindbladGenerator gen(Operator::hamiltonian(Matrix::Zero(d, d)), {build_channel_generator(joint0.n_max())},
                              gamma_eff);
  EvolveOptions opt;
  opt.tol = tol;
  const auto states = evolve(joint0.rho(), gen, t_grid, opt);
  std::vector<JointCellField> out;
  out.reserve(states.size());
  for (const auto& s : states) out.emplace_back(s, joint0.n_max());
  return out;
}

Branches subtraction_branches(const Matrix& rho) {
  const long f = rho.rows();
  Branches b{Matrix::Zero(f, f), Matrix::Zero(f, f)};
  b.no_fire(0, 0) = rho(0, 0);
  for (long m = 1; m < f; ++m)
    for (long n = 1; n < f; ++n) {
      const double w = 2.0 * std::sqrt(static_cast<double>(n * m)) / static_cast<double>(n + m);
      b.fired(n - 1, m - 1) = w * rho(n, m);
    }
  return b;
}

SubtractionResult asymptotic_subtract(const FockField& field) {
  const long f = field.n_max() + 1;
  const Branches br = subtraction_branches(field.rho().matrix());
  const double p_vac = field.vacuum_probability();

  Matrix joint = Matrix::Zero(2 * f, 2 * f);
  joint.topLeftCorner(f, f) = br.no_fire;
  joint.bottomRightCorner(f, f) = br.fired;
  SubtractionResult r{p_vac, std::nullopt, JointCellField(DensityMatrix::unchecked(std::move(joint)), field.n_max())};
  const double fired = br.fired.trace().real();
  if (1.0 - p_vac > kVacuumCertain && fired > kVacuumCertain)
    r.rho_out = FockField(DensityMatrix(br.fired / fired, StateTolerances{1e-10, 1e-9, -1e-9}));
  return r;
}

MultiSubtraction multi_subtract(const FockField& field, long k) {
  if (k < 1) throw ValidationError("number of subtractions must be >= 1");
  std::vector<double> p_vacs;
  double prob = 1.0;
  FockField current = field;
  for (long step = 0; step < k; ++step) {
    SubtractionResult r = asymptotic_subtract(current);
    p_vacs.push_back(r.p_vac);
    prob *= 1.0 - r.p_vac;
    if (!r.rho_out) {
      std::ostringstream msg;
      msg << "all-" << k << "-fired branch has probability 0: no photon left before cell " << step + 1;
      throw ValidationError(msg.str());
    }
    current = std::move(*r.rho_out);
  }
  return MultiSubtraction{std::move(current), prob, std::move(p_vacs)};
}

}  // namespace superatom::photon
