// Command-line experiment runner: single runs, parameter grids, diagnostics.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pal/error.hpp"
#include "pal/harness/config.hpp"
#include "pal/harness/experiment.hpp"

namespace fs = std::filesystem;
using namespace pal::harness;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string output;
  std::string seeds;
  bool quiet = false;
  bool timing = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("config", opts.config_path, "Config file (flat key = value)")->required();
  cmd->add_option("--output,-o", opts.output, "Output directory (overrides run.output)");
  cmd->add_option("--seeds", opts.seeds, "Comma separated seeds (overrides run.seeds)");
  cmd->add_flag("--quiet,-q", opts.quiet, "Suppress progress output");
}

ExperimentConfig resolve(const CommonOptions& opts) {
  ExperimentConfig cfg = load_config(opts.config_path);
  if (!opts.output.empty()) cfg.output_path = opts.output;
  if (!opts.seeds.empty()) cfg.seeds = parse_seed_list(opts.seeds);
  return cfg;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw pal::ValidationError("cannot write " + path.string());
  return out;
}

// Wall-clock information lives here so the CSV bodies stay reproducible.
void write_metadata(const fs::path& dir, const std::string& command, const CommonOptions& opts,
                    std::chrono::steady_clock::duration elapsed) {
  auto out = open_output(dir / "metadata.txt");
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[64];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  out << "command = " << command << '\n'
      << "config = " << opts.config_path << '\n'
      << "finished_utc = " << stamp << '\n'
      << "elapsed_nanos = " << std::chrono::duration_cast<std::chrono::nanoseconds>(elapsed).count()
      << '\n';
}

std::size_t count_diverged(const std::vector<RunRecord>& records) {
  std::size_t n = 0;
  for (const auto& r : records) n += r.diverged ? 1 : 0;
  return n;
}

int cmd_run(const CommonOptions& opts, bool diagnose) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig cfg = resolve(opts);
  if (diagnose) cfg.record_diagnostics = true;
  const RunOutput result = run_experiment(cfg, diagnose);

  fs::create_directories(cfg.output_path);
  {
    auto out = open_output(cfg.output_path / "runs.csv");
    write_runs_csv(out, result.records, opts.timing);
  }
  if (diagnose) {
    if (cfg.seeds.size() == 1) {
      auto out = open_output(cfg.output_path / "profile.csv");
      write_profile_csv(out, result.profiles);
    } else {
      for (auto seed : cfg.seeds) {
        std::vector<ProfileRow> rows;
        for (const auto& r : result.profiles) {
          if (r.seed == seed) rows.push_back(r);
        }
        auto out = open_output(cfg.output_path / ("profile_seed" + std::to_string(seed) + ".csv"));
        write_profile_csv(out, rows);
      }
    }
  }
  write_metadata(cfg.output_path, diagnose ? "diagnose" : "run", opts, std::chrono::steady_clock::now() - start);

  if (!opts.quiet) {
    std::cout << result.records.size() << " records for " << cfg.seeds.size() << " seed(s), "
              << count_diverged(result.records) << " diverged -> " << (cfg.output_path / "runs.csv").string()
              << '\n';
    if (diagnose) std::cout << result.profiles.size() << " profile samples written\n";
  }
  return 0;
}

int cmd_grid(const CommonOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = resolve(opts);
  const GridSummary summary = grid_search(cfg, cfg.grid);

  fs::create_directories(cfg.output_path);
  {
    auto out = open_output(cfg.output_path / "grid.csv");
    write_grid_csv(out, summary);
  }
  write_metadata(cfg.output_path, "grid", opts, std::chrono::steady_clock::now() - start);
  if (!opts.quiet) {
    std::cout << summary.rows.size() << " combinations -> " << (cfg.output_path / "grid.csv").string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PAL line search experiment harness"};
  app.require_subcommand(1);

  CommonOptions run_opts, grid_opts, diag_opts;
  auto* run = app.add_subcommand("run", "Run one configuration for every seed, write runs.csv");
  add_common(run, run_opts);
  run->add_flag("--timing", run_opts.timing, "Fill the wall_nanos column (breaks byte reproducibility)");

  auto* grid = app.add_subcommand("grid", "Sweep the grid.* keys of a config, write grid.csv");
  add_common(grid, grid_opts);

  auto* diagnose = app.add_subcommand("diagnose", "Run with line profiles and angle records");
  add_common(diagnose, diag_opts);
  diagnose->add_flag("--timing", diag_opts.timing, "Fill the wall_nanos column");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_opts, false);
    if (grid->parsed()) return cmd_grid(grid_opts);
    if (diagnose->parsed()) return cmd_run(diag_opts, true);
  } catch (const pal::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
