#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

#include "pal/loss_oracle.hpp"

namespace pal {

/// PAL's four knobs. `s_max` is +infinity when the step is unbounded.
struct HyperParams {
  double mu = 0.1;       ///< measuring step size along the unit direction
  double alpha = 1.25;   ///< update step adaptation, >= 1
  double beta = 0.2;     ///< conjugate gradient factor, in [0, 1]
  double s_max = 10.0;   ///< maximum step size

  static constexpr double unbounded() { return std::numeric_limits<double>::infinity(); }

  /// Throws InvalidArgument naming the first violated constraint.
  void validate() const;
};

/// Parameters plus the previous search direction. Construct with
/// `OptimizerState::initial(theta0)` so prev_direction starts at zero.
struct OptimizerState {
  std::uint64_t t = 0;
  Vector prev_direction;
  Vector theta;

  static OptimizerState initial(Vector theta0);
};

enum class StepCase { MinimumFound, ConcaveOrLinear, Extremum };

std::string_view to_string(StepCase c);

/// l(s) ~ a*s^2 + b*s + c
struct ParabolaCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double operator()(double s) const { return (a * s + b) * s + c; }
};

/// Full trace of one PAL update.
struct StepReport {
  double l0 = 0.0;
  double l_mu = 0.0;
  double b = 0.0;
  double a = 0.0;
  StepCase step_case = StepCase::Extremum;
  double s_raw = 0.0;
  double s_upd = 0.0;
  bool clamped = false;
  /// The conjugate direction was not a descent direction and was replaced by
  /// the negative gradient for this step.
  bool direction_reset = false;
  double grad_norm = 0.0;
};

struct CaseSelection {
  StepCase step_case;
  double s_raw;
};

ParabolaCoefficients fit_parabola(double l0, double dderiv, double l_mu, double mu);

CaseSelection select_case(double a, double b, double mu, double alpha);

Vector conjugate_direction(const Vector& grad, const Vector& prev_dir, double beta);

double directional_derivative(const Vector& grad, const Vector& dir);

/// Norms below `degenerate_norm_threshold(theta)` are treated as zero:
/// 1e-12 * max(1, ||theta||).
double degenerate_norm_threshold(const Vector& theta);

/// One PAL update. Uses exactly two `value` calls and one `gradient` call on
/// `oracle`, all under the noise realization fixed by the caller's preceding
/// `begin_step`. Updates `state` in place.
///
/// At a stationary point (gradient and direction both numerically zero) no
/// measurement is taken: the report has case Extremum, l_mu = l0 and theta is
/// left unchanged. Throws Diverged if either loss is non-finite.
StepReport pal_step(const LossOracle& oracle, OptimizerState& state, const HyperParams& hp);

}  // namespace pal
