#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace dth {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix sizes do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A user-facing parameter is out of its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A model returned a non-finite value, gradient or hessian.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, Eigen::VectorXd z);
  const Eigen::VectorXd& state() const noexcept { return state_; }

 private:
  Eigen::VectorXd state_;
};

/// Newton iteration on the midpoint equation ran out of iterations.
class NonconvergenceError : public Error {
 public:
  NonconvergenceError(const std::string& what, double residual, int iterations);
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// The Jacobian of the midpoint equation is numerically singular.
class LinearSolveError : public Error {
 public:
  LinearSolveError(const std::string& what, double rcond);
  double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

/// Requested operation is not defined for the region a point falls in.
class UnsupportedRegionError : public Error {
 public:
  using Error::Error;
};

/// Inputs violate a documented precondition (e.g. ghost-sequence checks).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// No multiplier of the requested sign exists in the searched window.
/// Carries the theorem verdict that backs (or fails to back) the claim.
class StepNonexistenceError : public Error {
 public:
  StepNonexistenceError(const std::string& what, std::string verdict);
  const std::string& verdict() const noexcept { return verdict_; }

 private:
  std::string verdict_;
};

}  // namespace dth
