#include "pal/problems/quadratic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>

#include <Eigen/QR>

#include "pal/error.hpp"

namespace pal::problems {

QuadraticProblem::QuadraticProblem(Matrix q, Vector r, double c)
    : q_(std::move(q)), r_(std::move(r)), c_(c) {
  if (q_.rows() != q_.cols() || q_.rows() != r_.size() || q_.rows() == 0) {
    throw InvalidArgument("QuadraticProblem: Q must be square and match the length of r");
  }
  if (!q_.allFinite() || !r_.allFinite() || !std::isfinite(c_)) {
    throw InvalidArgument("QuadraticProblem: non-finite coefficients");
  }
  const double scale = std::max(1.0, q_.cwiseAbs().maxCoeff());
  if ((q_ - q_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument("QuadraticProblem: Q is not symmetric");
  }
  llt_.compute(q_);
  if (llt_.info() != Eigen::Success) {
    throw NotPositiveDefinite("QuadraticProblem: Q is not positive definite");
  }
}

QuadraticProblem QuadraticProblem::centered(Matrix q, const Vector& center) {
  Vector qc = q * center;
  Vector r = -2.0 * qc;
  const double c = center.dot(qc);
  return QuadraticProblem(std::move(q), std::move(r), c);
}

void QuadraticProblem::check_dim(const Vector& x) const {
  if (x.size() != r_.size()) {
    throw InvalidArgument("QuadraticProblem: expected dimension " + std::to_string(r_.size()) +
                          ", got " + std::to_string(x.size()));
  }
}

double QuadraticProblem::value(const Vector& x) const {
  check_dim(x);
  return c_ + r_.dot(x) + x.dot(q_ * x);
}

Vector QuadraticProblem::gradient(const Vector& x) const {
  check_dim(x);
  return 2.0 * (q_ * x) + r_;
}

ValueGrad QuadraticProblem::value_grad(const Vector& x) const {
  check_dim(x);
  const Vector qx = q_ * x;
  return {c_ + r_.dot(x) + x.dot(qx), 2.0 * qx + r_};
}

Vector QuadraticProblem::argmin() const { return -0.5 * llt_.solve(r_); }

ValueGrad quadratic_value_grad(const QuadraticProblem& p, const Vector& x) {
  return p.value_grad(x);
}

Vector quadratic_argmin(const QuadraticProblem& p) { return p.argmin(); }

StochasticQuadraticFamily::StochasticQuadraticFamily(Matrix shared_q, std::vector<Vector> linear,
                                                     std::vector<double> offset)
    : q_(std::move(shared_q)), linear_(std::move(linear)), offset_(std::move(offset)) {
  if (linear_.empty()) {
    throw InvalidArgument("StochasticQuadraticFamily: at least one batch is required");
  }
  if (linear_.size() != offset_.size()) {
    throw InvalidArgument("StochasticQuadraticFamily: linear and offset lists differ in length");
  }
  for (const auto& r : linear_) {
    if (r.size() != q_.rows()) {
      throw InvalidArgument("StochasticQuadraticFamily: linear term dimension mismatch");
    }
  }
  // Validates symmetry and definiteness of the shared matrix.
  (void)QuadraticProblem(q_, linear_.front(), offset_.front());
}

QuadraticProblem StochasticQuadraticFamily::batch(std::size_t i) const {
  return QuadraticProblem(q_, linear_.at(i), offset_.at(i));
}

QuadraticProblem StochasticQuadraticFamily::mean_problem() const {
  Vector r = Vector::Zero(q_.rows());
  double c = 0.0;
  for (std::size_t i = 0; i < linear_.size(); ++i) {
    r += linear_[i];
    c += offset_[i];
  }
  const double n = static_cast<double>(linear_.size());
  return QuadraticProblem(q_, r / n, c / n);
}

void StochasticQuadraticFamily::begin_step(std::uint64_t step_index) {
  cursor_ = static_cast<std::size_t>(step_index % linear_.size());
}

double StochasticQuadraticFamily::value(const Vector& x) const {
  if (x.size() != q_.rows()) throw InvalidArgument("StochasticQuadraticFamily: dimension mismatch");
  return offset_[cursor_] + linear_[cursor_].dot(x) + x.dot(q_ * x);
}

Vector StochasticQuadraticFamily::gradient(const Vector& x) const {
  if (x.size() != q_.rows()) throw InvalidArgument("StochasticQuadraticFamily: dimension mismatch");
  return 2.0 * (q_ * x) + linear_[cursor_];
}

MeanArgmin family_mean_argmin(const StochasticQuadraticFamily& fam) {
  MeanArgmin out;
  out.analytic = fam.mean_problem().argmin();

  Eigen::LLT<Matrix> llt(fam.shared_q());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("family_mean_argmin: shared Q is not positive definite");
  }
  out.averaged = Vector::Zero(fam.shared_q().rows());
  for (const auto& r : fam.per_batch_linear()) {
    out.averaged += -0.5 * llt.solve(r);
  }
  out.averaged /= static_cast<double>(fam.batch_count());
  return out;
}

Matrix make_random_spd(std::size_t n, double condition_number, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("make_random_spd: n must be at least 1");
  if (!(condition_number >= 1.0) || !std::isfinite(condition_number)) {
    throw InvalidArgument("make_random_spd: condition number must be finite and >= 1");
  }
  const auto dim = static_cast<Eigen::Index>(n);
  if (condition_number == 1.0) return Matrix::Identity(dim, dim);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;

  Vector eig(dim);
  const double log_kappa = std::log(condition_number);
  for (Eigen::Index i = 0; i < dim; ++i) eig(i) = std::exp(unit(rng) * log_kappa);
  eig(0) = 1.0;
  if (dim > 1) eig(dim - 1) = condition_number;

  Matrix gaussian(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) gaussian(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(gaussian);
  Matrix u = qr.householderQ();
  // Sign fix on R's diagonal makes U Haar distributed.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j) {
    if (r(j, j) < 0.0) u.col(j) *= -1.0;
  }

  Matrix spd = u * eig.asDiagonal() * u.transpose();
  return 0.5 * (spd + spd.transpose());
}

}  // namespace pal::problems
