#include <doctest.h>

#include <cmath>
#include <random>

#include "superatom/photon_channel.hpp"
#include "test_support.hpp"

using namespace superatom;
using namespace superatom::photon;

namespace {

FockField superposition_12(long n_max) {
  Vector psi = Vector::Zero(n_max + 1);
  psi(1) = psi(2) = 1.0 / std::sqrt(2.0);
  return FockField(DensityMatrix::pure(psi));
}

}  // namespace

TEST_CASE("channel jump operator") {
  for (long n_max : {1L, 4L, 12L}) {
    const Operator c = build_channel_generator(n_max);
    CHECK(c.dim() == 2 * (n_max + 1));
    CHECK(testing::max_abs(c.matrix * c.matrix) == 0.0);
    long nonzero = 0;
    for (long i = 0; i < c.dim(); ++i)
      for (long j = 0; j < c.dim(); ++j)
        if (c.matrix(i, j) != Complex(0.0)) ++nonzero;
    CHECK(nonzero == n_max);
    for (long n = 1; n <= n_max; ++n)
      CHECK(c.matrix(JointCellField::index(Cell::excited, n - 1, n_max), JointCellField::index(Cell::ground, n, n_max)) ==
            Complex(std::sqrt(static_cast<double>(n))));
  }
  CHECK_THROWS_AS(build_channel_generator(0), ValidationError);
}

TEST_CASE("closed-form ground-block decay") {
  std::mt19937_64 rng(51);
  const long n_max = 6;
  const FockField field(testing::random_state(rng, n_max + 1, 3, 1));
  const double g = 0.7;
  const auto grid = linspace(0.0, 3.0, 16);
  const auto traj = evolve_channel(JointCellField::ground(field), g, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Matrix blk = traj[k].block(Cell::ground);
    for (long n = 0; n <= n_max; ++n)
      for (long m = 0; m <= n_max; ++m) {
        const Complex expect = field.rho()(n, m) * std::exp(-static_cast<double>(n + m) * g * grid[k]);
        CHECK(std::abs(blk(n, m) - expect) < 1e-9);
      }
    CHECK(std::abs(traj[k].rho().matrix().trace().real() - 1.0) < 1e-10);
  }
}

TEST_CASE("single photon rate equation and vacuum stationarity") {
  const double g = 1.3;
  const auto grid = linspace(0.0, 2.0, 11);
  const auto one = evolve_channel(JointCellField::ground(FockField::fock(1, 4)), g, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double e = std::exp(-2.0 * g * grid[k]);
    CHECK(std::abs(one[k].rho().population(JointCellField::index(Cell::ground, 1, 4)) - e) < 1e-9);
    CHECK(std::abs(one[k].rho().population(JointCellField::index(Cell::excited, 0, 4)) - (1.0 - e)) < 1e-9);
  }
  const auto vac = evolve_channel(JointCellField::ground(FockField::vacuum(4)), g, grid);
  for (const auto& j : vac) CHECK(trace_distance(j.rho(), vac.front().rho()) == 0.0);
  CHECK_THROWS_AS(evolve_channel(JointCellField::ground(FockField::vacuum(4)), 0.0, grid), ValidationError);
}

TEST_CASE("asymptotic subtraction examples") {
  const auto one = asymptotic_subtract(FockField::fock(1, 5));
  CHECK(one.p_vac == 0.0);
  REQUIRE(one.rho_out);
  CHECK(trace_distance(one.rho_out->rho(), DensityMatrix::basis(6, 0)) < 1e-15);

  const auto sup = asymptotic_subtract(superposition_12(5));
  REQUIRE(sup.rho_out);
  const Matrix& out = sup.rho_out->rho().matrix();
  CHECK(out(0, 0).real() == doctest::Approx(0.5));
  CHECK(out(1, 1).real() == doctest::Approx(0.5));
  CHECK(out(0, 1).real() == doctest::Approx(std::sqrt(2.0) / 3.0));
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(out.topLeftCorner(2, 2)));
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  CHECK(es.eigenvalues().minCoeff() == doctest::Approx(0.5 - std::sqrt(2.0) / 3.0));

  Matrix mix = Matrix::Zero(4, 4);
  mix(0, 0) = 0.3;
  mix(1, 1) = 0.7;
  CHECK(asymptotic_subtract(FockField(mix)).p_vac == doctest::Approx(0.3));

  // p_vac = 1: explicit absent value
  const auto vac = asymptotic_subtract(FockField::vacuum(3));
  CHECK(vac.p_vac == 1.0);
  CHECK_FALSE(vac.rho_out.has_value());
  CHECK(vac.joint_final.cell_probability(Cell::ground) == 1.0);
}

TEST_CASE("Fock states lose exactly one photon and the absorber saturates") {
  for (long n = 1; n < 10; ++n) {
    const auto r = asymptotic_subtract(FockField::fock(n, 10));
    REQUIRE(r.rho_out);
    CHECK(r.rho_out->rho().population(n - 1) == doctest::Approx(1.0));
    CHECK(r.rho_out->mean_photon_number() == doctest::Approx(n - 1.0));
  }
  const auto once = asymptotic_subtract(FockField::fock(1, 4));
  CHECK_FALSE(asymptotic_subtract(*once.rho_out).rho_out.has_value());
  CHECK_THROWS_AS(multi_subtract(FockField::fock(1, 4), 2), ValidationError);
}

TEST_CASE("subtraction output matches direct evaluation of the map") {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 10; ++trial) {
    const long n_max = 8;
    const FockField field(testing::random_state(rng, n_max + 1, 2, 1));
    const auto r = asymptotic_subtract(field);
    REQUIRE(r.rho_out);
    const Matrix& rho = field.rho().matrix();
    double norm = 0.0, mean = 0.0;
    for (long n = 1; n <= n_max; ++n) {
      norm += rho(n, n).real();
      mean += (n - 1.0) * rho(n, n).real();
    }
    CHECK(r.rho_out->mean_photon_number() == doctest::Approx(mean / norm).epsilon(1e-12));
    for (long n = 1; n <= n_max; ++n)
      for (long m = 1; m <= n_max; ++m) {
        const Complex expect = 2.0 * std::sqrt(double(n * m)) / double(n + m) * rho(n, m) / norm;
        CHECK(std::abs(r.rho_out->rho()(n - 1, m - 1) - expect) < 1e-14);
      }
    // unconditioned map preserves trace, blocks match the stationary structure
    CHECK(r.joint_final.rho().matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.joint_final.cell_probability(Cell::ground) == doctest::Approx(r.p_vac));
    Eigen::SelfAdjointEigenSolver<Matrix> es(r.rho_out->rho().matrix());
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  }
}

TEST_CASE("long-time channel evolution converges to the asymptotic map") {
  std::mt19937_64 rng(53);
  const double g = 0.9;
  for (int trial = 0; trial < 10; ++trial) {
    const long n_max = 12;
    const FockField field(testing::random_state(rng, n_max + 1, 1 + trial % 4, 1));
    const auto end = evolve_channel(JointCellField::ground(field), g, {0.0, 12.0 / g}).back();
    const auto r = asymptotic_subtract(field);
    const auto cond = end.conditional_field(Cell::excited);
    REQUIRE(cond);
    CHECK(trace_distance(cond->rho(), r.rho_out->rho()) < 1e-5);
    CHECK(std::abs(end.cell_probability(Cell::ground) - r.p_vac) < 1e-5);
  }
}

TEST_CASE("leak guard") {
  Matrix top = Matrix::Zero(3, 3);
  top(2, 2) = 1.0;
  CHECK_THROWS_WITH_AS(FockField{top}, doctest::Contains("n_max"), ValidationError);
  CHECK_THROWS_AS(FockField::fock(4, 4), ValidationError);
  CHECK_THROWS_AS(JointCellField(DensityMatrix::basis(5, 0), 2), DimensionError);
}
