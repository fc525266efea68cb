#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace emfreeze {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using CSparse = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

// Error taxonomy. Every failure the library reports is one of these.

/// Argument outside the operation's domain (bad site, wrong sector, odd L, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operands live on different bases / dimensions.
class BasisMismatch : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Dense work requested above the configured dimension cap.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical invariant (Hermiticity, norm, real expectation) was violated.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative method failed to reach its tolerance.
class IterationError : public NumericalError {
 public:
  IterationError(const std::string& what, double residual)
      : NumericalError(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// ‖M|psi>‖ vanished, so the normalized overlap is undefined.
class DegenerateMetricError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace emfreeze
