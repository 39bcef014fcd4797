#include <doctest.h>

#include <cmath>
#include <random>

#include "superatom/lindblad.hpp"
#include "test_support.hpp"

using namespace superatom;

namespace {

// Literal superoperator, written without the folded effective Hamiltonian.
Matrix naive_rhs(const Matrix& rho, const Matrix& h, const std::vector<Matrix>& jumps, double rate) {
  const Complex i(0.0, 1.0);
  Matrix out = -i * (h * rho - rho * h);
  for (const auto& c : jumps) {
    const Matrix cd = c.adjoint();
    out += rate * (2.0 * c * rho * cd - cd * c * rho - rho * cd * c);
  }
  return out;
}

Matrix sigma_x() {
  Matrix s = Matrix::Zero(2, 2);
  s(0, 1) = s(1, 0) = 1.0;
  return s;
}

}  // namespace

TEST_CASE("rhs examples") {
  const Operator h0 = Operator::hamiltonian(Matrix::Zero(2, 2));
  const Matrix d = lindblad_rhs(DensityMatrix::basis(2, 0), h0, {Operator::projector(2, 0)}, 0.7);
  CHECK(testing::max_abs(d) == 0.0);

  Matrix plus = Matrix::Constant(2, 2, 0.5);
  const double g = 0.3;
  const Matrix dp = lindblad_rhs(DensityMatrix(plus), h0, {Operator::projector(2, 0), Operator::projector(2, 1)}, g);
  CHECK(std::abs(dp(0, 1) - Complex(-2.0 * g * 0.5)) < 1e-15);
  CHECK(std::abs(dp(0, 0)) < 1e-15);
  CHECK(std::abs(dp(1, 1)) < 1e-15);

  const Operator hx = Operator::hamiltonian(0.5 * 1.3 * sigma_x());
  const DensityMatrix rho(plus);
  const Matrix du = lindblad_rhs(DensityMatrix::basis(2, 0), hx, {}, 0.0);
  const Complex i(0.0, 1.0);
  const Matrix r0 = DensityMatrix::basis(2, 0).matrix();
  CHECK(testing::max_abs(du - (-i * (hx.matrix * r0 - r0 * hx.matrix))) < 1e-15);
}

TEST_CASE("rhs is traceless, Hermitian and matches the literal superoperator") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const long d = 2 + trial % 6;
    const Matrix h = testing::random_hermitian(rng, d);
    std::vector<Operator> jumps;
    std::vector<Matrix> raw;
    for (int k = 0; k < 3; ++k) {
      // mix dense and sparse jumps
      Matrix c = k == 0 ? testing::random_matrix(rng, d, d) : Operator::transition(d, k % d, (k + 1) % d).matrix;
      raw.push_back(c);
      jumps.push_back(Operator::jump(c));
    }
    const DensityMatrix rho(testing::random_state(rng, d, 2));
    const Matrix out = lindblad_rhs(rho, Operator::hamiltonian(h), jumps, 0.37);
    CHECK(std::abs(out.trace()) < 1e-12);
    CHECK(testing::max_abs(out - out.adjoint()) < 1e-12);
    CHECK(testing::max_abs(out - naive_rhs(rho.matrix(), h, raw, 0.37)) < 1e-11);

    LindbladGenerator gen(Operator::hamiltonian(h), jumps, 0.37);
    Matrix fast;
    gen.apply_hermitian(rho.matrix(), fast);
    CHECK(testing::max_abs(fast - out) < 1e-12);
    // non-Hermitian operand through the general path
    const Matrix x = testing::random_matrix(rng, d, d);
    CHECK(testing::max_abs(gen.apply(x) - naive_rhs(x, h, raw, 0.37)) < 1e-11);
  }
}

TEST_CASE("dimension mismatch names the operator") {
  const Operator h = Operator::hamiltonian(Matrix::Zero(3, 3), "H3");
  try {
    lindblad_rhs(DensityMatrix::basis(3, 0), h, {Operator::projector(2, 0)}, 1.0);
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    CHECK(e.operand().find("jump") != std::string::npos);
  }
  try {
    lindblad_rhs(DensityMatrix::basis(2, 0), h, {}, 1.0);
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    CHECK(e.operand().find("H3") != std::string::npos);
  }
  CHECK_THROWS_AS(LindbladGenerator(h, {}, -1.0), ValidationError);
}

TEST_CASE("Rabi oscillation and unitary invariants") {
  const double omega = 1.7;
  const Operator h = Operator::hamiltonian(0.5 * omega * sigma_x());
  const auto grid = linspace(0.0, 10.0, 201);
  const auto states = evolve(DensityMatrix::basis(2, 0), h, {}, 0.0, grid, 1e-10);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double c = std::cos(omega * grid[k] / 2.0);
    CHECK(std::abs(states[k].population(0) - c * c) < 1e-8);
    CHECK(std::abs(states[k].purity() - 1.0) < 1e-8);
  }
}

TEST_CASE("evolution keeps the state physical and converges in tol") {
  std::mt19937_64 rng(22);
  const long d = 5;
  const Operator h = Operator::hamiltonian(testing::random_hermitian(rng, d));
  std::vector<Operator> jumps;
  for (long i = 0; i + 1 < d; ++i) jumps.push_back(Operator::transition(d, i, i + 1));
  jumps.push_back(Operator::jump(testing::random_matrix(rng, d, d) * 0.3));
  const DensityMatrix rho0(testing::random_state(rng, d, 1));
  LindbladGenerator gen(h, jumps, 0.4);
  const auto grid = linspace(0.0, 8.0, 81);
  EvolveOptions opt;
  opt.tol = 1e-7;
  const auto a = evolve(rho0, gen, grid, opt);
  for (const auto& s : a) {
    const auto r = inspect(s.matrix());
    CHECK(r.trace_error < 1e-10);
    CHECK(r.hermiticity_error < 1e-10);
    CHECK(r.min_eigenvalue >= -1e-9);
  }
  opt.tol = 0.5e-7;
  const auto b = evolve(rho0, gen, grid, opt);
  CHECK(testing::max_abs(a.back().matrix() - b.back().matrix()) < 1e-7);
}

TEST_CASE("evolve rejects bad input and reports step exhaustion with the time") {
  const Operator h = Operator::hamiltonian(0.5 * sigma_x());
  CHECK_THROWS_AS(evolve(DensityMatrix::basis(2, 0), h, {}, 0.0, {0.0, 1.0}, 1e-2), ValidationError);
  CHECK_THROWS_AS(evolve(DensityMatrix::basis(2, 0), h, {}, 0.0, {1.0, 0.5}, 1e-8), ValidationError);
  CHECK_THROWS_AS(evolve(DensityMatrix::basis(3, 0), h, {}, 0.0, {0.0, 1.0}, 1e-8), DimensionError);
  LindbladGenerator gen(h, {}, 0.0);
  EvolveOptions opt;
  opt.max_steps = 5;
  CHECK_THROWS_WITH_AS(evolve(DensityMatrix::basis(2, 0), gen, {0.0, 100.0}, opt), doctest::Contains("t ="),
                       NumericalError);
}

TEST_CASE("strong dephasing: N = 1 decays monotonically to one half") {
  const double omega = 1.0, gamma = 20.0;
  const Operator h = Operator::hamiltonian(0.5 * omega * sigma_x());
  const auto grid = linspace(0.0, 400.0, 801);
  const auto states = evolve(DensityMatrix::basis(2, 0), h, {Operator::projector(2, 1)}, gamma, grid, 1e-9);
  for (std::size_t k = 1; k < states.size(); ++k) CHECK(states[k].population(0) <= states[k - 1].population(0) + 1e-12);
  CHECK(states.back().population(0) == doctest::Approx(0.5).epsilon(1e-6));
}
