#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Core>

namespace pal {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A differentiable objective whose randomness (batch choice, noise masks) is
/// scoped to an optimizer step.
///
/// `begin_step(k)` selects the batch and draws the noise realization for step
/// `k`. Until the next `begin_step`, `value` and `gradient` are pure functions
/// of theta: every evaluation sees the same batch and the same random numbers,
/// which keeps the loss continuous along a line for the duration of one line
/// search.
class LossOracle {
 public:
  virtual ~LossOracle() = default;

  virtual std::size_t dimension() const = 0;
  virtual void begin_step(std::uint64_t step_index) = 0;
  virtual double value(const Vector& theta) const = 0;
  virtual Vector gradient(const Vector& theta) const = 0;
};

}  // namespace pal
