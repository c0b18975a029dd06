#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pal/baselines.hpp"
#include "pal/linesearch.hpp"
#include "pal/problems/mlp.hpp"

namespace pal::harness {

enum class ProblemKind { Quadratic, StochasticQuadratic, Mlp };
enum class OptimizerKind { Pal, SgdMomentum, Adam, RmsProp };

std::string_view to_string(ProblemKind kind);
std::string_view to_string(OptimizerKind kind);

/// (x - x*)' Q (x - x*) with Q from make_random_spd(dim, condition, seed) and
/// x* ~ center_scale * N(0, I). Start point x* + start_scale * N(0, I).
struct QuadraticSettings {
  std::size_t dim = 2;
  double condition = 1.0;
  double center_scale = 0.0;
  double start_scale = 1.0;
};

/// `batches` parabolas sharing Q, with r_i ~ spread * N(0, I) and c_i = 0.
struct StochasticQuadraticSettings {
  std::size_t dim = 2;
  double condition = 10.0;
  std::size_t batches = 8;
  double spread = 1.0;
  double start_scale = 1.0;
};

struct MlpSettings {
  std::vector<std::size_t> hidden{16};
  problems::Activation activation = problems::Activation::Tanh;
  std::size_t batch_size = 32;
  double keep_probability = 0.9;  ///< 1 disables the noise mask
  std::size_t samples = 500;
  std::uint64_t dataset_seed = 0;
  std::filesystem::path dataset_path;  ///< when set, overrides the generated blobs
};

struct DiagnoseSettings {
  std::size_t profile_every = 50;
  std::size_t profile_points = 50;
};

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::Quadratic;
  QuadraticSettings quadratic;
  StochasticQuadraticSettings stochastic;
  MlpSettings mlp;

  OptimizerKind optimizer = OptimizerKind::Pal;
  HyperParams pal;
  BaselineConfig sgd{BaselineKind::SgdMomentum, 0.1, 0.9};
  BaselineConfig adam{BaselineKind::Adam, 0.001};
  BaselineConfig rmsprop{BaselineKind::RmsProp, 0.001};

  std::size_t max_steps = 100;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  bool record_diagnostics = false;
  std::filesystem::path output_path = "pal_out";
  DiagnoseSettings diagnose;

  /// Parameter sweeps: config key -> values, each value in config-file syntax.
  std::map<std::string, std::vector<std::string>> grid;

  const BaselineConfig& baseline() const;
};

/// Sets one dotted key from its textual value. Throws ValidationError for an
/// unknown key or an unparsable value.
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);

bool is_config_key(std::string_view key);
std::vector<std::string> config_keys();

/// Throws ValidationError listing every violated field, one per line.
void validate(const ExperimentConfig& cfg);

/// Flat `key = value` lines; `#` starts a comment. `grid.<key> = a, b, c`
/// declares a sweep over <key>. Collects every bad line before throwing.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<std::uint64_t> parse_seed_list(std::string_view text);

}  // namespace pal::harness
