#pragma once

#include <cstdint>
#include <string_view>

#include "pal/loss_oracle.hpp"

namespace pal {

enum class BaselineKind { SgdMomentum, Adam, RmsProp };

std::string_view to_string(BaselineKind kind);

/// Hyperparameters for the first-order reference optimizers. Only the fields
/// relevant to `kind` are read.
///
/// Update rules (g = gradient, t counted from 1):
///   SgdMomentum  v <- momentum*v + g;            theta <- theta - lr*v
///   Adam         m <- b1*m + (1-b1)*g;  s <- b2*s + (1-b2)*g^2
///                theta <- theta - lr * m_hat / (sqrt(s_hat) + epsilon)
///                with bias-corrected m_hat = m/(1-b1^t), s_hat = s/(1-b2^t)
///   RmsProp      s <- rho*s + (1-rho)*g^2;       theta <- theta - lr*g / sqrt(s + epsilon)
///                (uncentered; epsilon sits inside the square root)
/// None of them applies weight decay.
struct BaselineConfig {
  BaselineKind kind = BaselineKind::SgdMomentum;
  double learning_rate = 0.01;
  double momentum = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double discounting = 0.9;

  void validate() const;
};

struct BaselineState {
  std::uint64_t t = 0;
  Vector theta;
  Vector velocity;        ///< SgdMomentum
  Vector first_moment;    ///< Adam
  Vector second_moment;   ///< Adam, RmsProp

  static BaselineState initial(Vector theta0, BaselineKind kind);
};

struct BaselineStepResult {
  Vector theta;   ///< parameters after the update
  double loss;    ///< batch loss at the parameters before the update
  double grad_norm;
};

/// One update of the configured kind: one `value` and one `gradient` call.
/// Updates `state` in place. Throws Diverged on a non-finite loss.
BaselineStepResult baseline_step(const LossOracle& oracle, BaselineState& state,
                                 const BaselineConfig& cfg);

}  // namespace pal
