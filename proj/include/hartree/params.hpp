#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hartree {

/// Point of R^n. The dimension is a runtime quantity carried by ProblemParams.
using Point = Eigen::VectorXd;

// Error categories. The CLI maps them onto exit codes.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the admissible parameter domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Floating-point range exceeded; the message names the subexpression.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A quadrature or discretization failed its requested tolerance.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

/// Declared power-law tails make an integral divergent.
class IntegrabilityError : public Error {
 public:
  using Error::Error;
};

/// Grid too small or malformed for the requested operation.
class GridError : public Error {
 public:
  using Error::Error;
};

/// A field evaluated to a non-finite value while being sampled.
class SamplingError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver or fit did not converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A candidate profile does not cover the requested radii.
class CoverageError : public Error {
 public:
  using Error::Error;
};

/// Dimension n and Riesz order alpha. Everything else is derived.
struct ProblemParams {
  int n = 3;
  double alpha = 2.0;

  ProblemParams() = default;
  ProblemParams(int n_, double alpha_) : n(n_), alpha(alpha_) { validate(); }

  void validate() const {
    if (n < 3) throw ParameterError("dimension n must be >= 3, got " + std::to_string(n));
    if (!(alpha > 0.0 && alpha < n))
      throw ParameterError("alpha must lie in (0, n), got " + std::to_string(alpha));
  }

  /// (n-2)/2, the Emden-Fowler weight exponent.
  double nu() const { return 0.5 * (n - 2); }

  bool operator==(const ProblemParams&) const = default;
};

}  // namespace hartree
