#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dspec {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

// Structural problems with user input (bad dimensions, rank, shape).
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Failure of a numerical procedure (step cap, boundary zero, ill-conditioning).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Violated precondition of an operation (e.g. z on a separating line).
class PreconditionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace dspec
