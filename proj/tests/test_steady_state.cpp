#include <doctest.h>

#include <cmath>
#include <random>

#include "superatom/lindblad.hpp"
#include "superatom/superatom.hpp"
#include "test_support.hpp"

using namespace superatom;

TEST_CASE("pack and unpack are inverse on Hermitian matrices") {
  std::mt19937_64 rng(31);
  for (long d : {1L, 2L, 5L}) {
    const Matrix h = testing::random_hermitian(rng, d);
    CHECK(testing::max_abs(unpack_hermitian(pack_hermitian(h), d) - h) < 1e-15);
  }
}

TEST_CASE("real Liouvillian agrees with the generator column by column") {
  std::mt19937_64 rng(32);
  const long d = 4;
  const Operator h = Operator::hamiltonian(testing::random_hermitian(rng, d));
  std::vector<Operator> jumps{Operator::jump(testing::random_matrix(rng, d, d)), Operator::projector(d, 2)};
  LindbladGenerator gen(h, jumps, 0.8);
  const RealMatrix l = hermitian_liouvillian(gen);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix x = testing::random_hermitian(rng, d);
    Matrix lx;
    gen.apply_hermitian(x, lx);
    CHECK((l * pack_hermitian(x) - pack_hermitian(lx)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("steady state examples") {
  const Operator h0 = Operator::hamiltonian(Matrix::Zero(2, 2));
  const auto g = steady_state(h0, {Operator::transition(2, 0, 1)}, 1.0);
  CHECK(trace_distance(g, DensityMatrix::basis(2, 0)) < 1e-12);

  for (long n : {3L, 9L}) {
    const auto m = model::build_model(model::SuperatomParams::dimensionless(n, 1.0));
    const auto rho = steady_state(m.generator());
    CHECK(trace_distance(rho, DensityMatrix::maximally_mixed(n + 1)) < 1e-10);
    CHECK(expectation(rho, Operator::projector(n + 1, 0)).real() == doctest::Approx(1.0 / (n + 1)).epsilon(1e-10));
  }
}

TEST_CASE("degenerate null space reports its multiplicity") {
  const Operator h0 = Operator::hamiltonian(Matrix::Zero(3, 3));
  LindbladGenerator gen(h0, {Operator::projector(3, 0), Operator::projector(3, 1)}, 1.0);
  CHECK(null_space_dimension(gen) == 3);
  CHECK_THROWS_WITH_AS(steady_state(gen), doctest::Contains("multiplicity 3"), NumericalError);
}

TEST_CASE("steady state is a fixed point of the evolution") {
  const auto p = model::SuperatomParams::dimensionless(3, 0.5);
  const auto m = model::build_model(p);
  const auto gen = m.generator();
  const auto rho = steady_state(gen);
  Matrix r;
  gen.apply_hermitian(rho.matrix(), r);
  CHECK(testing::max_abs(r) < 1e-10);
  // slowest rate is at least ~0.5 Omega_N^2/gamma here; 10 / 0.5 = 20 covers 10/Gamma_eff
  EvolveOptions opt;
  opt.tol = 1e-10;
  const auto traj = evolve(rho, gen, {0.0, 20.0}, opt);
  CHECK(trace_distance(traj.back(), rho) < 1e-8);
}

TEST_CASE("integration fallback for large systems agrees with the dense solve") {
  const auto m = model::build_model(model::SuperatomParams::dimensionless(6, 1.0));
  SteadyStateOptions opt;
  opt.dense_dim_limit = 3;  // force the fallback
  const auto rho = steady_state(m.generator(), opt);
  CHECK(trace_distance(rho, DensityMatrix::maximally_mixed(7)) < 1e-8);
}
