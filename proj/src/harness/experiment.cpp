#include "pal/harness/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "pal/baselines.hpp"
#include "pal/diagnostics.hpp"
#include "pal/error.hpp"
#include "pal/linesearch.hpp"
#include "pal/problems/dataset.hpp"
#include "pal/problems/mlp.hpp"

namespace pal::harness {

namespace {

Vector gaussian_vector(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = scale * normal(rng);
  return v;
}

std::mt19937_64 problem_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x51u};
  return std::mt19937_64(seq);
}

}  // namespace

ProblemInstance make_problem(const ExperimentConfig& cfg, std::uint64_t seed) {
  ProblemInstance inst;
  auto rng = problem_rng(seed);
  switch (cfg.problem) {
    case ProblemKind::Quadratic: {
      const auto& s = cfg.quadratic;
      const auto n = static_cast<Eigen::Index>(s.dim);
      Matrix q = problems::make_random_spd(s.dim, s.condition, seed);
      const Vector center = s.center_scale > 0.0 ? gaussian_vector(rng, n, s.center_scale) : Vector::Zero(n);
      inst.theta0 = center + gaussian_vector(rng, n, s.start_scale);
      auto problem = std::make_shared<problems::QuadraticProblem>(
          s.center_scale > 0.0 ? problems::QuadraticProblem::centered(q, center)
                               : problems::QuadraticProblem(q, Vector::Zero(n), 0.0));
      inst.objective = [problem](const Vector& x) { return problem->value_grad(x); };
      inst.oracle = std::make_unique<problems::QuadraticProblem>(*problem);
      break;
    }
    case ProblemKind::StochasticQuadratic: {
      const auto& s = cfg.stochastic;
      const auto n = static_cast<Eigen::Index>(s.dim);
      Matrix q = problems::make_random_spd(s.dim, s.condition, seed);
      std::vector<Vector> linear;
      for (std::size_t i = 0; i < s.batches; ++i) linear.push_back(gaussian_vector(rng, n, s.spread));
      inst.theta0 = gaussian_vector(rng, n, s.start_scale);
      auto family = std::make_unique<problems::StochasticQuadraticFamily>(
          q, std::move(linear), std::vector<double>(s.batches, 0.0));
      auto mean = std::make_shared<problems::QuadraticProblem>(family->mean_problem());
      inst.objective = [mean](const Vector& x) { return mean->value_grad(x); };
      inst.oracle = std::move(family);
      break;
    }
    case ProblemKind::Mlp: {
      const auto& s = cfg.mlp;
      problems::Dataset data = s.dataset_path.empty() ? problems::make_two_blobs(s.samples, s.dataset_seed)
                                                      : problems::load_dataset(s.dataset_path);
      problems::MlpConfig mc;
      mc.layer_dims.assign(1, data.feature_dim());
      mc.layer_dims.insert(mc.layer_dims.end(), s.hidden.begin(), s.hidden.end());
      mc.layer_dims.push_back(std::max<std::size_t>(2, data.num_classes()));
      mc.activation = s.activation;
      mc.batch_size = s.batch_size;
      mc.noise = s.keep_probability < 1.0 ? problems::NoiseKind::MultiplicativeMask : problems::NoiseKind::None;
      mc.keep_probability = s.keep_probability;
      mc.seed = seed;
      auto mlp = std::make_unique<problems::MlpProblem>(std::move(mc), std::move(data));
      inst.theta0 = mlp->initial_parameters(seed);
      const problems::MlpProblem* raw = mlp.get();
      inst.objective = [raw](const Vector& x) { return raw->full_dataset(x); };
      inst.oracle = std::move(mlp);
      break;
    }
  }
  return inst;
}

namespace {

/// Runs one seed and appends its records (and profiles) to `out`.
void run_seed(const ExperimentConfig& cfg, std::uint64_t seed, bool with_profiles, RunOutput& out) {
  ProblemInstance inst = make_problem(cfg, seed);
  LossOracle& oracle = *inst.oracle;
  const bool is_pal = cfg.optimizer == OptimizerKind::Pal;
  const bool record_angles = cfg.record_diagnostics || with_profiles;

  OptimizerState pal_state = OptimizerState::initial(inst.theta0);
  BaselineState base_state = BaselineState::initial(inst.theta0, cfg.baseline().kind);

  for (std::uint64_t step = 1; step <= cfg.max_steps; ++step) {
    oracle.begin_step(step - 1);
    const Vector theta_before = is_pal ? pal_state.theta : base_state.theta;

    RunRecord rec;
    rec.seed = seed;
    rec.step = step;
    const auto start = std::chrono::steady_clock::now();
    try {
      if (is_pal) {
        const StepReport report = pal_step(oracle, pal_state, cfg.pal);
        rec.s_upd = report.s_upd;
        rec.case_label = std::string(to_string(report.step_case));
      } else {
        baseline_step(oracle, base_state, cfg.baseline());
      }
    } catch (const Diverged&) {
      rec.wall_nanos = std::chrono::duration_cast<std::chrono::nanoseconds>(
                           std::chrono::steady_clock::now() - start).count();
      rec.loss = std::numeric_limits<double>::quiet_NaN();
      rec.grad_norm = std::numeric_limits<double>::quiet_NaN();
      rec.case_label = "diverged";
      rec.diverged = true;
      out.records.push_back(std::move(rec));
      return;
    }
    rec.wall_nanos = std::chrono::duration_cast<std::chrono::nanoseconds>(
                         std::chrono::steady_clock::now() - start).count();

    const Vector& theta_after = is_pal ? pal_state.theta : base_state.theta;
    const Vector travel = theta_after - theta_before;
    const bool moved = travel.norm() >= degenerate_norm_threshold(theta_before) && travel.allFinite();

    if (record_angles && moved) {
      try {
        const auto angle = diagnostics::angle_at_estimated_minimum(oracle, theta_after, travel,
                                                                   static_cast<std::int64_t>(step));
        rec.angle_degrees = angle.angle_degrees;
      } catch (const Diverged&) {
      }
    }

    if (with_profiles && moved && (step == 1 || step % cfg.diagnose.profile_every == 0)) {
      try {
        const double s_upd = travel.norm();
        const auto grid = diagnostics::default_profile_grid(s_upd, cfg.diagnose.profile_points);
        const auto profile = diagnostics::sample_line_profile(oracle, theta_before, travel, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
          out.profiles.push_back({seed, step, profile.s_values[i], profile.losses[i], profile.fitted.a,
                                  profile.fitted.b, profile.fitted.c});
        }
      } catch (const Diverged&) {
      }
    }

    bool diverged = false;
    try {
      const auto full = inst.objective(theta_after);
      rec.loss = full.value;
      rec.grad_norm = full.grad.norm();
      diverged = !std::isfinite(rec.loss) || rec.loss > kDivergenceLimit;
    } catch (const Diverged&) {
      rec.loss = std::numeric_limits<double>::quiet_NaN();
      rec.grad_norm = std::numeric_limits<double>::quiet_NaN();
      diverged = true;
    }
    if (diverged) {
      rec.case_label = "diverged";
      rec.diverged = true;
      out.records.push_back(std::move(rec));
      return;
    }
    out.records.push_back(std::move(rec));
  }
}

}  // namespace

RunOutput run_experiment(const ExperimentConfig& cfg, bool with_profiles) {
  validate(cfg);
  RunOutput out;
  for (std::uint64_t seed : cfg.seeds) run_seed(cfg, seed, with_profiles, out);
  return out;
}

GridSummary grid_search(const ExperimentConfig& base,
                        const std::map<std::string, std::vector<std::string>>& grid) {
  ExperimentConfig checked = base;
  checked.grid = grid;
  validate(checked);

  GridSummary summary;
  std::vector<const std::vector<std::string>*> lists;
  for (const auto& [key, values] : grid) {
    summary.keys.push_back(key);
    lists.push_back(&values);
  }

  std::vector<std::size_t> index(lists.size(), 0);
  while (true) {
    ExperimentConfig cfg = base;
    cfg.grid.clear();
    GridRow row;
    for (std::size_t k = 0; k < lists.size(); ++k) {
      const std::string& value = (*lists[k])[index[k]];
      set_config_value(cfg, summary.keys[k], value);
      row.values.push_back(value);
    }

    std::vector<double> finals;
    const RunOutput result = run_experiment(cfg);
    for (std::uint64_t seed : cfg.seeds) {
      const RunRecord* last = nullptr;
      for (const auto& r : result.records) {
        if (r.seed == seed) last = &r;
      }
      if (last == nullptr || last->diverged) {
        ++row.diverged_count;
      } else {
        finals.push_back(last->loss);
      }
    }
    if (!finals.empty()) {
      std::sort(finals.begin(), finals.end());
      row.min_final_loss = finals.front();
      row.median_final_loss = finals[(finals.size() - 1) / 2];
    }
    summary.rows.push_back(std::move(row));

    // odometer, last key fastest
    std::size_t k = lists.size();
    while (k > 0) {
      --k;
      if (++index[k] < lists[k]->size()) break;
      index[k] = 0;
      if (k == 0) return summary;
    }
    if (lists.empty()) return summary;
  }
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& records, bool include_timing) {
  out << "seed,step,loss,grad_norm,s_upd,case,angle_deg,wall_nanos\n";
  for (const auto& r : records) {
    out << r.seed << ',' << r.step << ',' << format_real(r.loss) << ',' << format_real(r.grad_norm) << ',';
    if (r.s_upd) out << format_real(*r.s_upd);
    out << ',' << r.case_label << ',';
    if (r.angle_degrees) out << format_real(*r.angle_degrees);
    out << ',';
    if (include_timing) out << r.wall_nanos;
    out << '\n';
  }
}

void write_grid_csv(std::ostream& out, const GridSummary& summary) {
  for (const auto& key : summary.keys) out << key << ',';
  out << "min_final_loss,median_final_loss,diverged_count\n";
  for (const auto& row : summary.rows) {
    for (const auto& v : row.values) out << v << ',';
    if (row.min_final_loss) out << format_real(*row.min_final_loss);
    out << ',';
    if (row.median_final_loss) out << format_real(*row.median_final_loss);
    out << ',' << row.diverged_count << '\n';
  }
}

void write_profile_csv(std::ostream& out, const std::vector<ProfileRow>& rows) {
  out << "step,s,loss,fit_a,fit_b,fit_c\n";
  for (const auto& r : rows) {
    out << r.step << ',' << format_real(r.s) << ',' << format_real(r.loss) << ',' << format_real(r.fit_a)
        << ',' << format_real(r.fit_b) << ',' << format_real(r.fit_c) << '\n';
  }
}

}  // namespace pal::harness
