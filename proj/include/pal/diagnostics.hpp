#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pal/linesearch.hpp"
#include "pal/loss_oracle.hpp"

namespace pal::diagnostics {

/// Loss sampled along theta + s * dir/||dir||, with the parabola PAL would
/// fit from l(0), l'(0) and l(mu) where mu is the smallest positive s.
struct LineProfile {
  std::vector<double> s_values;
  std::vector<double> losses;
  ParabolaCoefficients fitted;
  std::optional<double> s_min_estimate;  ///< -b/(2a), present when a > 0
};

/// Angle between the travel direction and the gradient after a step. Values
/// above 90 degrees mean the step overshot the line minimum, below 90 means
/// it stopped short. `angle_degrees` is empty when the gradient is
/// numerically zero.
struct AngleRecord {
  std::int64_t step = 0;
  std::optional<double> angle_degrees;
  double grad_norm_at_estimate = 0.0;
};

/// The oracle's step (batch and noise) must already be fixed by the caller.
/// Throws InvalidArgument if the grid is empty, unsorted, or has no positive
/// value; DegenerateDirection if dir is numerically zero.
LineProfile sample_line_profile(const LossOracle& oracle, const Vector& theta, const Vector& dir,
                                const std::vector<double>& s_grid);

AngleRecord angle_at_estimated_minimum(const LossOracle& oracle, const Vector& theta_new,
                                       const Vector& dir, std::int64_t step = 0);

/// max_i |loss_i - p(s_i)| / max(1, |loss_i|)
double parabola_fit_residual(const LineProfile& profile);

/// `points` uniform samples over [lo_factor * s_upd, hi_factor * s_upd]
/// (defaults -0.5 and 2.5), for profiling around an accepted step.
std::vector<double> default_profile_grid(double s_upd, std::size_t points = 50,
                                         double lo_factor = -0.5, double hi_factor = 2.5);

}  // namespace pal::diagnostics
