#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace superatom {

using Complex = std::complex<double>;
// Column-major, matching the layout the kernels expect.
using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Invalid inputs: bad parameters, shape mismatches, states violating their
// invariants. The CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public ValidationError {
 public:
  DimensionError(const std::string& operand, long expected, long actual)
      : ValidationError("dimension mismatch for " + operand + ": expected " +
                        std::to_string(expected) + ", got " + std::to_string(actual)),
        operand_(operand) {}

  const std::string& operand() const { return operand_; }

 private:
  std::string operand_;
};

// Integration blew up, a tolerance could not be met, a linear system was
// degenerate. The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace superatom
