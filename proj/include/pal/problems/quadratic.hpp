#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Cholesky>

#include "pal/loss_oracle.hpp"

namespace pal::problems {

struct ValueGrad {
  double value;
  Vector grad;
};

/// f(x) = c + r'x + x'Qx with Q symmetric positive definite.
///
/// Construction checks symmetry (entrywise within 1e-12, scaled by the largest
/// entry when that exceeds one) and positive definiteness through a Cholesky
/// factorization, which is kept for solves.
class QuadraticProblem final : public LossOracle {
 public:
  QuadraticProblem(Matrix q, Vector r, double c);

  /// (x - center)' Q (x - center): minimizer `center`, minimum value 0.
  static QuadraticProblem centered(Matrix q, const Vector& center);

  const Matrix& q() const noexcept { return q_; }
  const Vector& r() const noexcept { return r_; }
  double c() const noexcept { return c_; }

  std::size_t dimension() const override { return static_cast<std::size_t>(r_.size()); }
  void begin_step(std::uint64_t) override {}
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;

  ValueGrad value_grad(const Vector& x) const;

  /// -1/2 Q^{-1} r through the stored factorization.
  Vector argmin() const;

 private:
  void check_dim(const Vector& x) const;

  Matrix q_;
  Vector r_;
  double c_;
  Eigen::LLT<Matrix> llt_;
};

ValueGrad quadratic_value_grad(const QuadraticProblem& p, const Vector& x);
Vector quadratic_argmin(const QuadraticProblem& p);

/// Batches of parabolas that share one curvature matrix Q but differ in their
/// linear and constant terms. `begin_step(k)` selects batch k mod batch_count.
class StochasticQuadraticFamily final : public LossOracle {
 public:
  StochasticQuadraticFamily(Matrix shared_q, std::vector<Vector> linear, std::vector<double> offset);

  const Matrix& shared_q() const noexcept { return q_; }
  const std::vector<Vector>& per_batch_linear() const noexcept { return linear_; }
  const std::vector<double>& per_batch_offset() const noexcept { return offset_; }
  std::size_t batch_count() const noexcept { return linear_.size(); }
  std::size_t batch_cursor() const noexcept { return cursor_; }

  /// Quadratic of batch i alone.
  QuadraticProblem batch(std::size_t i) const;
  /// Mean of all batch parabolas (same Q, averaged r and c).
  QuadraticProblem mean_problem() const;

  std::size_t dimension() const override { return static_cast<std::size_t>(q_.rows()); }
  void begin_step(std::uint64_t step_index) override;
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;

 private:
  Matrix q_;
  std::vector<Vector> linear_;
  std::vector<double> offset_;
  std::size_t cursor_ = 0;
};

struct MeanArgmin {
  Vector analytic;  ///< argmin of the mean parabola
  Vector averaged;  ///< mean of the per-batch argmins
};

MeanArgmin family_mean_argmin(const StochasticQuadraticFamily& fam);

/// U' D U with Haar-random orthogonal U and eigenvalues log-uniform in
/// [1, condition_number]; for n >= 2 the extremes 1 and condition_number are
/// always present.
Matrix make_random_spd(std::size_t n, double condition_number, std::uint64_t seed);

}  // namespace pal::problems
