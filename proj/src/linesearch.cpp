#include "pal/linesearch.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "pal/error.hpp"

namespace pal {

void HyperParams::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw InvalidArgument("mu must be a positive finite number, got " + std::to_string(mu));
  }
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("alpha must be >= 1, got " + std::to_string(alpha));
  }
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw InvalidArgument("beta must lie in [0, 1], got " + std::to_string(beta));
  }
  if (!(s_max > 0.0)) {
    throw InvalidArgument("s_max must be positive, got " + std::to_string(s_max));
  }
}

OptimizerState OptimizerState::initial(Vector theta0) {
  OptimizerState state;
  state.prev_direction = Vector::Zero(theta0.size());
  state.theta = std::move(theta0);
  return state;
}

std::string_view to_string(StepCase c) {
  switch (c) {
    case StepCase::MinimumFound:
      return "minimum";
    case StepCase::ConcaveOrLinear:
      return "concave";
    case StepCase::Extremum:
      return "extremum";
  }
  return "unknown";
}

ParabolaCoefficients fit_parabola(double l0, double dderiv, double l_mu, double mu) {
  if (!std::isfinite(l0) || !std::isfinite(dderiv) || !std::isfinite(l_mu) || !std::isfinite(mu)) {
    throw InvalidArgument("fit_parabola: non-finite input");
  }
  if (!(mu > 0.0)) {
    throw InvalidArgument("fit_parabola: mu must be positive");
  }
  return {(l_mu - l0 - dderiv * mu) / (mu * mu), dderiv, l0};
}

CaseSelection select_case(double a, double b, double mu, double alpha) {
  if (b < 0.0) {
    if (a > 0.0) {
      return {StepCase::MinimumFound, -alpha * b / (2.0 * a)};
    }
    return {StepCase::ConcaveOrLinear, mu};
  }
  return {StepCase::Extremum, 0.0};
}

Vector conjugate_direction(const Vector& grad, const Vector& prev_dir, double beta) {
  if (grad.size() != prev_dir.size()) {
    throw InvalidArgument("conjugate_direction: gradient has dimension " +
                          std::to_string(grad.size()) + " but previous direction has " +
                          std::to_string(prev_dir.size()));
  }
  return -grad + beta * prev_dir;
}

double degenerate_norm_threshold(const Vector& theta) {
  return 1e-12 * std::max(1.0, theta.norm());
}

namespace {

double checked_directional_derivative(const Vector& grad, const Vector& dir, double threshold) {
  if (grad.size() != dir.size()) {
    throw InvalidArgument("directional_derivative: dimension mismatch");
  }
  const double norm = dir.norm();
  if (!(norm >= threshold)) {
    throw DegenerateDirection("directional_derivative: direction norm " + std::to_string(norm) +
                              " is numerically zero");
  }
  return grad.dot(dir) / norm;
}

}  // namespace

double directional_derivative(const Vector& grad, const Vector& dir) {
  return checked_directional_derivative(grad, dir, 1e-12);
}

StepReport pal_step(const LossOracle& oracle, OptimizerState& state, const HyperParams& hp) {
  if (state.theta.size() != static_cast<Eigen::Index>(oracle.dimension())) {
    throw InvalidArgument("pal_step: parameter dimension does not match the oracle");
  }
  if (state.prev_direction.size() != state.theta.size()) {
    throw InvalidArgument("pal_step: previous direction dimension does not match parameters");
  }
  if (!state.theta.allFinite()) {
    throw InvalidArgument("pal_step: parameters are not finite");
  }

  StepReport report;
  const Vector& theta = state.theta;
  const double threshold = degenerate_norm_threshold(theta);

  report.l0 = oracle.value(theta);
  if (!std::isfinite(report.l0)) {
    throw Diverged("pal_step: non-finite loss at the current point", theta);
  }
  const Vector grad = oracle.gradient(theta);
  report.grad_norm = grad.norm();

  Vector direction = conjugate_direction(grad, state.prev_direction, hp.beta);
  const bool grad_degenerate = report.grad_norm < threshold;

  if (direction.norm() < threshold) {
    if (grad_degenerate) {
      report.l_mu = report.l0;
      report.b = 0.0;
      report.a = 0.0;
      report.step_case = StepCase::Extremum;
      state.prev_direction = std::move(direction);
      ++state.t;
      return report;
    }
    direction = -grad;
    report.direction_reset = true;
  }

  report.b = checked_directional_derivative(grad, direction, threshold);
  if (report.b >= 0.0 && !grad_degenerate && report.grad_norm > 0.0) {
    direction = -grad;
    report.direction_reset = true;
    report.b = -report.grad_norm;
  }

  const Vector unit = direction / direction.norm();
  report.l_mu = oracle.value(theta + hp.mu * unit);
  if (!std::isfinite(report.l_mu)) {
    throw Diverged("pal_step: non-finite loss at the measuring point", theta);
  }

  const ParabolaCoefficients fit = fit_parabola(report.l0, report.b, report.l_mu, hp.mu);
  report.a = fit.a;

  const CaseSelection selected = select_case(fit.a, fit.b, hp.mu, hp.alpha);
  report.step_case = selected.step_case;
  report.s_raw = selected.s_raw;
  report.clamped = report.s_raw > hp.s_max;
  report.s_upd = report.clamped ? hp.s_max : report.s_raw;

  if (report.s_upd > 0.0) {
    state.theta += report.s_upd * unit;
  }
  state.prev_direction = std::move(direction);
  ++state.t;
  return report;
}

}  // namespace pal
