#include "pal/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "pal/error.hpp"

namespace pal::diagnostics {

LineProfile sample_line_profile(const LossOracle& oracle, const Vector& theta, const Vector& dir,
                                const std::vector<double>& s_grid) {
  if (s_grid.empty()) throw InvalidArgument("sample_line_profile: empty grid");
  if (std::adjacent_find(s_grid.begin(), s_grid.end(), std::greater_equal<>()) != s_grid.end()) {
    throw InvalidArgument("sample_line_profile: grid must be strictly increasing");
  }
  const auto first_positive = std::find_if(s_grid.begin(), s_grid.end(), [](double s) { return s > 0.0; });
  if (first_positive == s_grid.end()) {
    throw InvalidArgument("sample_line_profile: grid needs a positive value to fit the parabola");
  }
  if (dir.size() != theta.size()) throw InvalidArgument("sample_line_profile: dimension mismatch");
  const double norm = dir.norm();
  if (!(norm >= degenerate_norm_threshold(theta))) {
    throw DegenerateDirection("sample_line_profile: direction is numerically zero");
  }
  const Vector unit = dir / norm;

  LineProfile profile;
  profile.s_values = s_grid;
  profile.losses.reserve(s_grid.size());
  for (double s : s_grid) {
    const double loss = s == 0.0 ? oracle.value(theta) : oracle.value(theta + s * unit);
    if (!std::isfinite(loss)) throw Diverged("sample_line_profile: non-finite loss", theta + s * unit);
    profile.losses.push_back(loss);
  }

  const double mu = *first_positive;
  const double l0 = oracle.value(theta);
  const double l_mu = profile.losses[static_cast<std::size_t>(first_positive - s_grid.begin())];
  const double slope = oracle.gradient(theta).dot(unit);
  profile.fitted = fit_parabola(l0, slope, l_mu, mu);
  if (profile.fitted.a > 0.0) {
    profile.s_min_estimate = -profile.fitted.b / (2.0 * profile.fitted.a);
  }
  return profile;
}

AngleRecord angle_at_estimated_minimum(const LossOracle& oracle, const Vector& theta_new,
                                       const Vector& dir, std::int64_t step) {
  if (dir.size() != theta_new.size()) {
    throw InvalidArgument("angle_at_estimated_minimum: dimension mismatch");
  }
  const double dir_norm = dir.norm();
  if (!(dir_norm >= degenerate_norm_threshold(theta_new))) {
    throw DegenerateDirection("angle_at_estimated_minimum: direction is numerically zero");
  }
  AngleRecord record;
  record.step = step;
  const Vector g = oracle.gradient(theta_new);
  record.grad_norm_at_estimate = g.norm();
  if (record.grad_norm_at_estimate < degenerate_norm_threshold(theta_new)) return record;

  const double cosine = std::clamp(dir.dot(g) / (dir_norm * record.grad_norm_at_estimate), -1.0, 1.0);
  record.angle_degrees = std::acos(cosine) * 180.0 / std::numbers::pi;
  return record;
}

double parabola_fit_residual(const LineProfile& profile) {
  double worst = 0.0;
  for (std::size_t i = 0; i < profile.s_values.size(); ++i) {
    const double loss = profile.losses[i];
    const double err = std::abs(loss - profile.fitted(profile.s_values[i])) / std::max(1.0, std::abs(loss));
    worst = std::max(worst, err);
  }
  return worst;
}

std::vector<double> default_profile_grid(double s_upd, std::size_t points, double lo_factor,
                                         double hi_factor) {
  if (!(s_upd > 0.0)) throw InvalidArgument("default_profile_grid: step must be positive");
  if (points < 2) throw InvalidArgument("default_profile_grid: need at least two points");
  std::vector<double> grid(points);
  const double lo = lo_factor * s_upd;
  const double hi = hi_factor * s_upd;
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return grid;
}

}  // namespace pal::diagnostics
