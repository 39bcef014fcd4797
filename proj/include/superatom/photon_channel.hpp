#pragma once

#include <map>
#include <optional>
#include <vector>

#include "superatom/density_matrix.hpp"

namespace superatom::photon {

// Largest population allowed in the top Fock level of an accepted field.
inline constexpr double kLeakGuard = 1e-6;
// 1 - p_vac at or below this means "no photon, certainly".
inline constexpr double kVacuumCertain = 1e-14;

// Single-mode field truncated to |0>..|n_max>.
class FockField {
 public:
  // Validates the density matrix and the truncation leak guard.
  explicit FockField(DensityMatrix rho);
  FockField(Matrix rho) : FockField(DensityMatrix(std::move(rho))) {}

  long n_max() const { return rho_.dim() - 1; }
  const DensityMatrix& rho() const { return rho_; }
  double vacuum_probability() const { return rho_.population(0); }
  double mean_photon_number() const;

  static FockField vacuum(long n_max);
  static FockField fock(long n, long n_max);

 private:
  DensityMatrix rho_;
};

enum class Cell : long { ground = 0, excited = 1 };

// Two-level cell {|G>, |E>} tensored with the field; joint index is
// cell * (n_max + 1) + n.
class JointCellField {
 public:
  JointCellField(DensityMatrix rho, long n_max);

  static JointCellField ground(const FockField& field);  // |G><G| (x) rho

  long n_max() const { return n_max_; }
  const DensityMatrix& rho() const { return rho_; }
  static long index(Cell cell, long n, long n_max) { return static_cast<long>(cell) * (n_max + 1) + n; }

  // Unnormalized field block <cell| rho |cell>.
  Matrix block(Cell cell) const;
  double cell_probability(Cell cell) const;
  // Normalized field conditioned on the cell reading; empty if that branch has no weight.
  std::optional<FockField> conditional_field(Cell cell) const;

 private:
  DensityMatrix rho_;
  long n_max_;
};

// c = |E><G| (x) a on the joint space; c*c == 0 is checked exactly.
Operator build_channel_generator(long n_max);

std::vector<JointCellField> evolve_channel(const JointCellField& joint0, double gamma_eff,
                                           const std::vector<double>& t_grid, double tol = 1e-10);

// Unnormalized long-time branches of one cell acting on rho:
//   no_fire = rho_00 |0><0|,
//   fired   = sum_{n,m>=1} 2 sqrt(nm)/(n+m) rho_nm |n-1><m-1|.
struct Branches {
  Matrix no_fire;
  Matrix fired;
};
Branches subtraction_branches(const Matrix& rho);

struct SubtractionResult {
  double p_vac = 1.0;
  std::optional<FockField> rho_out;  // absent when p_vac == 1
  JointCellField joint_final;
};

SubtractionResult asymptotic_subtract(const FockField& field);

struct CascadeResult {
  long k = 0;
  std::vector<double> fired_distribution;              // index = number of cells that fired
  std::map<long, FockField> conditional_outputs;       // only branches with nonzero weight
};

// Cells fully equilibrate before the beam moves on.
CascadeResult cascade(const FockField& field, long k);

// Each cell interacts for a finite time t_cell at rate gamma_eff.
CascadeResult cascade_finite_time(const FockField& field, long k, double gamma_eff, double t_cell,
                                  double tol = 1e-10);

struct MultiSubtraction {
  FockField output;
  double probability = 0.0;         // all k cells fired
  std::vector<double> p_vac_steps;  // vacuum probability entering each cell
};

// Output conditioned on all k cells firing. Throws ValidationError when that
// branch has zero probability.
MultiSubtraction multi_subtract(const FockField& field, long k);

}  // namespace superatom::photon
