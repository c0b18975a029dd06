#include "pal/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "pal/error.hpp"

namespace pal::harness {

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Quadratic:
      return "quadratic";
    case ProblemKind::StochasticQuadratic:
      return "stochastic_quadratic";
    case ProblemKind::Mlp:
      return "mlp";
  }
  return "unknown";
}

std::string_view to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::Pal:
      return "pal";
    case OptimizerKind::SgdMomentum:
      return "sgd";
    case OptimizerKind::Adam:
      return "adam";
    case OptimizerKind::RmsProp:
      return "rmsprop";
  }
  return "unknown";
}

const BaselineConfig& ExperimentConfig::baseline() const {
  switch (optimizer) {
    case OptimizerKind::Adam:
      return adam;
    case OptimizerKind::RmsProp:
      return rmsprop;
    default:
      return sgd;
  }
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto comma = text.find(',');
    parts.push_back(trim(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return parts;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ValidationError(std::string(key) + ": cannot parse '" + std::string(value) + "' as " +
                        std::string(expected));
}

double parse_number(std::string_view key, std::string_view value) {
  double out = 0.0;
  auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || res.ec != std::errc() || res.ptr != value.data() + value.size() || std::isnan(out)) {
    bad_value(key, value, "a real number");
  }
  return out;
}

// Accepts plain decimals, "inf"/"unbounded", and a quotient "p/q" such as 1/0.8.
double parse_real(std::string_view key, std::string_view value) {
  if (value == "inf" || value == "unbounded") return std::numeric_limits<double>::infinity();
  if (const auto slash = value.find('/'); slash != std::string_view::npos) {
    const double num = parse_number(key, trim(value.substr(0, slash)));
    const double den = parse_number(key, trim(value.substr(slash + 1)));
    if (den == 0.0) bad_value(key, value, "a quotient with non-zero denominator");
    return num / den;
  }
  return parse_number(key, value);
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    bad_value(key, value, "a non-negative integer");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value, "a boolean");
}

using Setter = std::function<void(ExperimentConfig&, std::string_view key, std::string_view value)>;

template <typename T>
Setter real_field(T ExperimentConfig::*group, double T::*field) {
  return [group, field](ExperimentConfig& c, std::string_view k, std::string_view v) {
    (c.*group).*field = parse_real(k, v);
  };
}

template <typename T>
Setter size_field(T ExperimentConfig::*group, std::size_t T::*field) {
  return [group, field](ExperimentConfig& c, std::string_view k, std::string_view v) {
    (c.*group).*field = static_cast<std::size_t>(parse_unsigned(k, v));
  };
}

const std::map<std::string, Setter, std::less<>>& registry() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    t["problem.kind"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      if (v == "quadratic") c.problem = ProblemKind::Quadratic;
      else if (v == "stochastic_quadratic") c.problem = ProblemKind::StochasticQuadratic;
      else if (v == "mlp") c.problem = ProblemKind::Mlp;
      else bad_value(k, v, "one of quadratic, stochastic_quadratic, mlp");
    };
    t["problem.quadratic.dim"] = size_field(&ExperimentConfig::quadratic, &QuadraticSettings::dim);
    t["problem.quadratic.condition"] = real_field(&ExperimentConfig::quadratic, &QuadraticSettings::condition);
    t["problem.quadratic.center_scale"] = real_field(&ExperimentConfig::quadratic, &QuadraticSettings::center_scale);
    t["problem.quadratic.start_scale"] = real_field(&ExperimentConfig::quadratic, &QuadraticSettings::start_scale);

    t["problem.stochastic_quadratic.dim"] =
        size_field(&ExperimentConfig::stochastic, &StochasticQuadraticSettings::dim);
    t["problem.stochastic_quadratic.condition"] =
        real_field(&ExperimentConfig::stochastic, &StochasticQuadraticSettings::condition);
    t["problem.stochastic_quadratic.batches"] =
        size_field(&ExperimentConfig::stochastic, &StochasticQuadraticSettings::batches);
    t["problem.stochastic_quadratic.spread"] =
        real_field(&ExperimentConfig::stochastic, &StochasticQuadraticSettings::spread);
    t["problem.stochastic_quadratic.start_scale"] =
        real_field(&ExperimentConfig::stochastic, &StochasticQuadraticSettings::start_scale);

    t["problem.mlp.hidden"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.mlp.hidden.clear();
      for (auto part : split_list(v)) {
        if (part.empty()) continue;
        c.mlp.hidden.push_back(static_cast<std::size_t>(parse_unsigned(k, part)));
      }
    };
    t["problem.mlp.activation"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      if (v == "tanh") c.mlp.activation = problems::Activation::Tanh;
      else if (v == "relu") c.mlp.activation = problems::Activation::Relu;
      else bad_value(k, v, "tanh or relu");
    };
    t["problem.mlp.batch_size"] = size_field(&ExperimentConfig::mlp, &MlpSettings::batch_size);
    t["problem.mlp.keep_probability"] = real_field(&ExperimentConfig::mlp, &MlpSettings::keep_probability);
    t["problem.mlp.samples"] = size_field(&ExperimentConfig::mlp, &MlpSettings::samples);
    t["problem.mlp.dataset_seed"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.mlp.dataset_seed = parse_unsigned(k, v);
    };
    t["problem.mlp.dataset"] = [](ExperimentConfig& c, std::string_view, std::string_view v) {
      c.mlp.dataset_path = std::string(v);
    };

    t["optimizer.kind"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      if (v == "pal") c.optimizer = OptimizerKind::Pal;
      else if (v == "sgd") c.optimizer = OptimizerKind::SgdMomentum;
      else if (v == "adam") c.optimizer = OptimizerKind::Adam;
      else if (v == "rmsprop") c.optimizer = OptimizerKind::RmsProp;
      else bad_value(k, v, "one of pal, sgd, adam, rmsprop");
    };
    t["optimizer.pal.mu"] = real_field(&ExperimentConfig::pal, &HyperParams::mu);
    t["optimizer.pal.alpha"] = real_field(&ExperimentConfig::pal, &HyperParams::alpha);
    t["optimizer.pal.beta"] = real_field(&ExperimentConfig::pal, &HyperParams::beta);
    t["optimizer.pal.s_max"] = real_field(&ExperimentConfig::pal, &HyperParams::s_max);

    t["optimizer.sgd.lr"] = real_field(&ExperimentConfig::sgd, &BaselineConfig::learning_rate);
    t["optimizer.sgd.momentum"] = real_field(&ExperimentConfig::sgd, &BaselineConfig::momentum);
    t["optimizer.adam.lr"] = real_field(&ExperimentConfig::adam, &BaselineConfig::learning_rate);
    t["optimizer.adam.beta1"] = real_field(&ExperimentConfig::adam, &BaselineConfig::beta1);
    t["optimizer.adam.beta2"] = real_field(&ExperimentConfig::adam, &BaselineConfig::beta2);
    t["optimizer.adam.epsilon"] = real_field(&ExperimentConfig::adam, &BaselineConfig::epsilon);
    t["optimizer.rmsprop.lr"] = real_field(&ExperimentConfig::rmsprop, &BaselineConfig::learning_rate);
    t["optimizer.rmsprop.discounting"] = real_field(&ExperimentConfig::rmsprop, &BaselineConfig::discounting);
    t["optimizer.rmsprop.epsilon"] = real_field(&ExperimentConfig::rmsprop, &BaselineConfig::epsilon);

    t["run.max_steps"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.max_steps = static_cast<std::size_t>(parse_unsigned(k, v));
    };
    t["run.seeds"] = [](ExperimentConfig& c, std::string_view, std::string_view v) {
      c.seeds = parse_seed_list(v);
    };
    t["run.record_diagnostics"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.record_diagnostics = parse_bool(k, v);
    };
    t["run.output"] = [](ExperimentConfig& c, std::string_view, std::string_view v) {
      c.output_path = std::string(v);
    };
    t["diagnose.profile_every"] = size_field(&ExperimentConfig::diagnose, &DiagnoseSettings::profile_every);
    t["diagnose.profile_points"] = size_field(&ExperimentConfig::diagnose, &DiagnoseSettings::profile_points);
    return t;
  }();
  return table;
}

}  // namespace

bool is_config_key(std::string_view key) { return registry().find(key) != registry().end(); }

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : registry()) keys.push_back(k);
  return keys;
}

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  const auto it = registry().find(key);
  if (it == registry().end()) {
    throw ValidationError("unknown key '" + std::string(key) + "'");
  }
  it->second(cfg, key, trim(value));
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  for (auto part : split_list(text)) {
    if (part.empty()) continue;
    seeds.push_back(parse_unsigned("seeds", part));
  }
  return seeds;
}

void validate(const ExperimentConfig& cfg) {
  std::vector<std::string> errors;
  auto check = [&](bool ok, std::string message) {
    if (!ok) errors.push_back(std::move(message));
  };

  check(cfg.max_steps >= 1, "run.max_steps: must be at least 1");
  check(!cfg.seeds.empty(), "run.seeds: at least one seed is required");

  switch (cfg.problem) {
    case ProblemKind::Quadratic:
      check(cfg.quadratic.dim >= 1 && cfg.quadratic.dim <= 200, "problem.quadratic.dim: must lie in [1, 200]");
      check(cfg.quadratic.condition >= 1.0 && std::isfinite(cfg.quadratic.condition),
            "problem.quadratic.condition: must be finite and >= 1");
      check(cfg.quadratic.center_scale >= 0.0, "problem.quadratic.center_scale: must be >= 0");
      check(cfg.quadratic.start_scale > 0.0, "problem.quadratic.start_scale: must be positive");
      break;
    case ProblemKind::StochasticQuadratic:
      check(cfg.stochastic.dim >= 1 && cfg.stochastic.dim <= 200,
            "problem.stochastic_quadratic.dim: must lie in [1, 200]");
      check(cfg.stochastic.condition >= 1.0 && std::isfinite(cfg.stochastic.condition),
            "problem.stochastic_quadratic.condition: must be finite and >= 1");
      check(cfg.stochastic.batches >= 1, "problem.stochastic_quadratic.batches: must be at least 1");
      check(cfg.stochastic.spread >= 0.0, "problem.stochastic_quadratic.spread: must be >= 0");
      check(cfg.stochastic.start_scale > 0.0, "problem.stochastic_quadratic.start_scale: must be positive");
      break;
    case ProblemKind::Mlp:
      for (auto h : cfg.mlp.hidden) check(h >= 1, "problem.mlp.hidden: layer widths must be positive");
      check(cfg.mlp.batch_size >= 1, "problem.mlp.batch_size: must be at least 1");
      check(cfg.mlp.keep_probability > 0.0 && cfg.mlp.keep_probability <= 1.0,
            "problem.mlp.keep_probability: must lie in (0, 1]");
      check(!cfg.mlp.dataset_path.empty() || cfg.mlp.samples >= 2, "problem.mlp.samples: must be at least 2");
      break;
  }

  auto check_optimizer = [&](auto&& fn, const std::string& prefix) {
    try {
      fn();
    } catch (const InvalidArgument& e) {
      errors.push_back(prefix + ": " + e.what());
    }
  };
  switch (cfg.optimizer) {
    case OptimizerKind::Pal:
      check(cfg.pal.mu > 0.0 && std::isfinite(cfg.pal.mu), "optimizer.pal.mu: must be positive and finite");
      check(cfg.pal.alpha >= 1.0 && std::isfinite(cfg.pal.alpha), "optimizer.pal.alpha: must be >= 1");
      check(cfg.pal.beta >= 0.0 && cfg.pal.beta <= 1.0, "optimizer.pal.beta: must lie in [0, 1]");
      check(cfg.pal.s_max > 0.0, "optimizer.pal.s_max: must be positive");
      break;
    case OptimizerKind::SgdMomentum:
      check_optimizer([&] { cfg.sgd.validate(); }, "optimizer.sgd");
      break;
    case OptimizerKind::Adam:
      check_optimizer([&] { cfg.adam.validate(); }, "optimizer.adam");
      break;
    case OptimizerKind::RmsProp:
      check_optimizer([&] { cfg.rmsprop.validate(); }, "optimizer.rmsprop");
      break;
  }

  check(cfg.diagnose.profile_every >= 1, "diagnose.profile_every: must be at least 1");
  check(cfg.diagnose.profile_points >= 2, "diagnose.profile_points: must be at least 2");

  for (const auto& [key, values] : cfg.grid) {
    if (!is_config_key(key)) {
      errors.push_back("grid." + key + ": unknown key '" + key + "'");
      continue;
    }
    if (values.empty()) errors.push_back("grid." + key + ": empty value list");
    for (const auto& v : values) {
      ExperimentConfig probe = cfg;
      probe.grid.clear();
      try {
        set_config_value(probe, key, v);
        validate(probe);
      } catch (const ValidationError& e) {
        errors.push_back("grid." + key + " = " + v + ": " + e.what());
      }
    }
  }

  if (!errors.empty()) {
    std::string message = "invalid configuration:";
    for (const auto& e : errors) message += "\n  " + e;
    throw ValidationError(message);
  }
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::vector<std::string> errors;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
      continue;
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    try {
      if (key.starts_with("grid.")) {
        const std::string target(key.substr(5));
        if (!is_config_key(target)) throw ValidationError("unknown key '" + std::string(key) + "'");
        auto& list = cfg.grid[target];
        list.clear();
        for (auto part : split_list(value)) list.emplace_back(part);
      } else {
        set_config_value(cfg, key, value);
      }
    } catch (const ValidationError& e) {
      errors.push_back("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!errors.empty()) {
    std::string message = "invalid configuration:";
    for (const auto& e : errors) message += "\n  " + e;
    throw ValidationError(message);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace pal::harness
