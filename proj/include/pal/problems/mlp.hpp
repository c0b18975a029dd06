#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pal/loss_oracle.hpp"
#include "pal/problems/dataset.hpp"
#include "pal/problems/quadratic.hpp"

namespace pal::problems {

enum class Activation { Tanh, Relu };
enum class NoiseKind { None, MultiplicativeMask };

struct MlpConfig {
  std::vector<std::size_t> layer_dims{2, 16, 2};
  Activation activation = Activation::Tanh;
  std::size_t batch_size = 32;
  NoiseKind noise = NoiseKind::MultiplicativeMask;
  double keep_probability = 0.9;
  std::uint64_t seed = 1;
};

/// One realization of the hidden-layer noise for a batch: for each hidden
/// layer a (units x batch) matrix of 0 or 1/keep_probability entries. Empty
/// when the problem has no noise.
struct NoiseDraw {
  std::vector<Matrix> masks;
};

/// Fully connected softmax classifier with mean cross-entropy loss.
///
/// Parameter layout: for each layer in order, the weight matrix
/// (out x in, column-major) followed by the bias vector.
///
/// `begin_step(k)` selects batch k of the epoch-shuffled sample order (a new
/// permutation per epoch, seeded by (seed, epoch)) and draws one Bernoulli mask
/// per hidden unit and sample, seeded by (seed, k). Both are pure functions of
/// k, so any step can be replayed exactly.
class MlpProblem final : public LossOracle {
 public:
  MlpProblem(MlpConfig config, Dataset data);

  const MlpConfig& config() const noexcept { return config_; }
  const Dataset& data() const noexcept { return data_; }
  std::size_t parameter_count() const noexcept { return param_count_; }
  std::size_t batches_per_epoch() const noexcept;

  /// Glorot-uniform weights, zero biases.
  Vector initial_parameters(std::uint64_t seed) const;

  std::vector<std::size_t> batch_indices(std::uint64_t step_index) const;
  NoiseDraw draw_noise(std::uint64_t step_index, std::size_t batch_len) const;

  /// Mean cross-entropy over `batch` and its gradient. Deterministic in
  /// (theta, batch, noise). Throws Diverged on non-finite activations.
  ValueGrad evaluate(const Vector& theta, std::span<const std::size_t> batch,
                     const NoiseDraw& noise) const;
  double evaluate_loss(const Vector& theta, std::span<const std::size_t> batch,
                       const NoiseDraw& noise) const;

  /// Whole dataset, no noise.
  ValueGrad full_dataset(const Vector& theta) const;

  /// Per-sample class probabilities for `batch` (classes x batch).
  Matrix probabilities(const Vector& theta, std::span<const std::size_t> batch,
                       const NoiseDraw& noise) const;

  const std::vector<std::size_t>& current_batch() const noexcept { return batch_; }
  const NoiseDraw& current_noise() const noexcept { return noise_; }

  std::size_t dimension() const override { return param_count_; }
  void begin_step(std::uint64_t step_index) override;
  double value(const Vector& theta) const override;
  Vector gradient(const Vector& theta) const override;

 private:
  struct Forward;
  Forward forward(const Vector& theta, std::span<const std::size_t> batch,
                  const NoiseDraw& noise) const;

  MlpConfig config_;
  Dataset data_;
  std::size_t param_count_ = 0;
  std::vector<std::size_t> batch_;
  NoiseDraw noise_;
};

ValueGrad mlp_value_grad(const MlpProblem& p, const Vector& theta,
                         std::span<const std::size_t> batch, const NoiseDraw& noise);

}  // namespace pal::problems
