#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pal/harness/config.hpp"
#include "pal/loss_oracle.hpp"
#include "pal/problems/quadratic.hpp"

namespace pal::harness {

/// One optimizer step. `loss` and `grad_norm` are measured on the full
/// deterministic objective at the parameters after the step.
struct RunRecord {
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  std::optional<double> s_upd;
  std::string case_label;  ///< PAL case, "diverged" on the marker row, else empty
  std::optional<double> angle_degrees;
  std::int64_t wall_nanos = 0;
  bool diverged = false;
};

struct ProfileRow {
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
  double s = 0.0;
  double loss = 0.0;
  double fit_a = 0.0;
  double fit_b = 0.0;
  double fit_c = 0.0;
};

/// A problem built for one seed: the stochastic oracle the optimizer sees,
/// the deterministic objective used for reporting, and the start point.
struct ProblemInstance {
  std::unique_ptr<LossOracle> oracle;
  std::function<problems::ValueGrad(const Vector&)> objective;
  Vector theta0;
};

ProblemInstance make_problem(const ExperimentConfig& cfg, std::uint64_t seed);

struct RunOutput {
  std::vector<RunRecord> records;
  std::vector<ProfileRow> profiles;
};

/// Losses that are non-finite or above this end a run.
inline constexpr double kDivergenceLimit = 1e12;

/// All seeds in order; one record per step, plus a marker row when a run
/// diverges (later seeds still run). Validates `cfg` first.
/// With `with_profiles`, line profiles are sampled every
/// `cfg.diagnose.profile_every` steps and angles are recorded on every step.
RunOutput run_experiment(const ExperimentConfig& cfg, bool with_profiles = false);

struct GridRow {
  std::vector<std::string> values;  ///< one per grid key, in key order
  std::optional<double> min_final_loss;
  std::optional<double> median_final_loss;
  std::size_t diverged_count = 0;
};

struct GridSummary {
  std::vector<std::string> keys;
  std::vector<GridRow> rows;
};

/// Cartesian product of `grid` in lexicographic key order, first key varying
/// slowest, values in the listed order. Medians use the lower-interpolation
/// convention (element floor((n-1)/2) of the sorted losses) over the seeds
/// that did not diverge.
GridSummary grid_search(const ExperimentConfig& base,
                        const std::map<std::string, std::vector<std::string>>& grid);

// CSV writers. Header row always present; empty fields where inapplicable.
// `include_timing` fills wall_nanos, otherwise that column stays empty so the
// file is reproducible byte for byte.
void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& records, bool include_timing);
void write_grid_csv(std::ostream& out, const GridSummary& summary);
void write_profile_csv(std::ostream& out, const std::vector<ProfileRow>& rows);

/// Shortest round-trip decimal representation.
std::string format_real(double value);

}  // namespace pal::harness
