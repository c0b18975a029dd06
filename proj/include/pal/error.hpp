#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace pal {

/// Precondition violation on user-supplied input (bad dimension, non-finite
/// value, out-of-range hyperparameter).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A search direction whose norm is numerically zero.
class DegenerateDirection : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cholesky factorization of a matrix that should be SPD failed.
class NotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The objective produced a non-finite value. Carries the parameters at which
/// it happened.
class Diverged : public std::runtime_error {
 public:
  Diverged(const std::string& what, Eigen::VectorXd theta)
      : std::runtime_error(what), theta_(std::move(theta)) {}

  const Eigen::VectorXd& theta() const noexcept { return theta_; }

 private:
  Eigen::VectorXd theta_;
};

/// Configuration rejected by validation. `what()` lists every violation, one
/// per line.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pal
