#include "pal/problems/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <utility>

#include "pal/error.hpp"

namespace pal::problems {

namespace {

using ConstMatrixMap = Eigen::Map<const Matrix>;
using ConstVectorMap = Eigen::Map<const Vector>;
using MatrixMap = Eigen::Map<Matrix>;
using VectorMap = Eigen::Map<Vector>;

constexpr std::uint64_t kShuffleStream = 0x5348;
constexpr std::uint64_t kNoiseStream = 0x4e4f;

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

struct MlpProblem::Forward {
  std::vector<Matrix> inputs;       // input to each layer (in x batch)
  std::vector<Matrix> pre;          // pre-activations of hidden layers
  Matrix log_probs;                 // classes x batch
  double loss = 0.0;
};

MlpProblem::MlpProblem(MlpConfig config, Dataset data)
    : config_(std::move(config)), data_(std::move(data)) {
  const auto& dims = config_.layer_dims;
  if (dims.size() < 2) throw InvalidArgument("MlpProblem: need at least input and output layers");
  if (std::any_of(dims.begin(), dims.end(), [](std::size_t d) { return d == 0; })) {
    throw InvalidArgument("MlpProblem: layer sizes must be positive");
  }
  if (data_.size() == 0) throw InvalidArgument("MlpProblem: empty dataset");
  if (data_.feature_dim() != dims.front()) {
    throw InvalidArgument("MlpProblem: dataset has " + std::to_string(data_.feature_dim()) +
                          " features but the input layer has " + std::to_string(dims.front()));
  }
  if (data_.num_classes() > dims.back()) {
    throw InvalidArgument("MlpProblem: dataset labels exceed the output layer width");
  }
  if (config_.batch_size == 0) throw InvalidArgument("MlpProblem: batch_size must be positive");
  if (config_.noise == NoiseKind::MultiplicativeMask &&
      !(config_.keep_probability > 0.0 && config_.keep_probability <= 1.0)) {
    throw InvalidArgument("MlpProblem: keep_probability must lie in (0, 1]");
  }
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    param_count_ += dims[l + 1] * dims[l] + dims[l + 1];
  }
  begin_step(0);
}

std::size_t MlpProblem::batches_per_epoch() const noexcept {
  return (data_.size() + config_.batch_size - 1) / config_.batch_size;
}

Vector MlpProblem::initial_parameters(std::uint64_t seed) const {
  Vector theta = Vector::Zero(static_cast<Eigen::Index>(param_count_));
  std::mt19937_64 rng(seed);
  const auto& dims = config_.layer_dims;
  Eigen::Index offset = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(dims[l]);
    const auto out = static_cast<Eigen::Index>(dims[l + 1]);
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index k = 0; k < in * out; ++k) theta(offset + k) = dist(rng);
    offset += in * out + out;
  }
  return theta;
}

std::vector<std::size_t> MlpProblem::batch_indices(std::uint64_t step_index) const {
  const std::uint64_t per_epoch = batches_per_epoch();
  const std::uint64_t epoch = step_index / per_epoch;
  const std::uint64_t position = step_index % per_epoch;

  std::vector<std::size_t> order(data_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto rng = seeded_engine(config_.seed, kShuffleStream, epoch);
  std::shuffle(order.begin(), order.end(), rng);

  const std::size_t begin = static_cast<std::size_t>(position) * config_.batch_size;
  const std::size_t end = std::min(begin + config_.batch_size, order.size());
  return {order.begin() + static_cast<std::ptrdiff_t>(begin),
          order.begin() + static_cast<std::ptrdiff_t>(end)};
}

NoiseDraw MlpProblem::draw_noise(std::uint64_t step_index, std::size_t batch_len) const {
  NoiseDraw draw;
  if (config_.noise == NoiseKind::None) return draw;
  const double keep = config_.keep_probability;
  auto rng = seeded_engine(config_.seed, kNoiseStream, step_index);
  std::uniform_real_distribution<double> unit;
  const auto& dims = config_.layer_dims;
  for (std::size_t l = 1; l + 1 < dims.size(); ++l) {
    Matrix mask(static_cast<Eigen::Index>(dims[l]), static_cast<Eigen::Index>(batch_len));
    for (Eigen::Index j = 0; j < mask.cols(); ++j) {
      for (Eigen::Index i = 0; i < mask.rows(); ++i) {
        mask(i, j) = unit(rng) < keep ? 1.0 / keep : 0.0;
      }
    }
    draw.masks.push_back(std::move(mask));
  }
  return draw;
}

void MlpProblem::begin_step(std::uint64_t step_index) {
  batch_ = batch_indices(step_index);
  noise_ = draw_noise(step_index, batch_.size());
}

MlpProblem::Forward MlpProblem::forward(const Vector& theta, std::span<const std::size_t> batch,
                                        const NoiseDraw& noise) const {
  if (static_cast<std::size_t>(theta.size()) != param_count_) {
    throw InvalidArgument("MlpProblem: expected " + std::to_string(param_count_) +
                          " parameters, got " + std::to_string(theta.size()));
  }
  if (batch.empty()) throw InvalidArgument("MlpProblem: empty batch");
  const auto& dims = config_.layer_dims;
  const std::size_t hidden_layers = dims.size() - 2;
  if (!noise.masks.empty() && noise.masks.size() != hidden_layers) {
    throw InvalidArgument("MlpProblem: noise draw does not match the hidden layers");
  }
  const auto cols = static_cast<Eigen::Index>(batch.size());

  Forward fw;
  Matrix x(static_cast<Eigen::Index>(dims.front()), cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const auto idx = batch[static_cast<std::size_t>(j)];
    if (idx >= data_.size()) throw InvalidArgument("MlpProblem: batch index out of range");
    x.col(j) = data_.features.row(static_cast<Eigen::Index>(idx)).transpose();
  }
  fw.inputs.push_back(std::move(x));

  Eigen::Index offset = 0;
  Matrix logits;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(dims[l]);
    const auto out = static_cast<Eigen::Index>(dims[l + 1]);
    ConstMatrixMap w(theta.data() + offset, out, in);
    ConstVectorMap b(theta.data() + offset + in * out, out);
    offset += in * out + out;

    Matrix z = w * fw.inputs.back();
    z.colwise() += b;
    if (l + 2 == dims.size()) {
      logits = std::move(z);
      break;
    }
    Matrix h = config_.activation == Activation::Tanh ? Matrix(z.array().tanh())
                                                      : Matrix(z.cwiseMax(0.0));
    if (!noise.masks.empty()) {
      const Matrix& mask = noise.masks[l];
      if (mask.rows() != out || mask.cols() != cols) {
        throw InvalidArgument("MlpProblem: noise mask shape does not match the batch");
      }
      h.array() *= mask.array();
    }
    fw.pre.push_back(std::move(z));
    fw.inputs.push_back(std::move(h));
  }

  if (!logits.allFinite()) {
    throw Diverged("MlpProblem: non-finite activations", theta);
  }
  const Eigen::RowVectorXd max_logit = logits.colwise().maxCoeff();
  Matrix shifted = logits.rowwise() - max_logit;
  const Eigen::RowVectorXd log_norm = shifted.array().exp().colwise().sum().log().matrix();
  fw.log_probs = shifted.rowwise() - log_norm;

  double total = 0.0;
  for (Eigen::Index j = 0; j < cols; ++j) {
    const int label = data_.labels[batch[static_cast<std::size_t>(j)]];
    total -= fw.log_probs(label, j);
  }
  fw.loss = total / static_cast<double>(cols);
  if (!std::isfinite(fw.loss)) throw Diverged("MlpProblem: non-finite loss", theta);
  return fw;
}

double MlpProblem::evaluate_loss(const Vector& theta, std::span<const std::size_t> batch,
                                 const NoiseDraw& noise) const {
  return forward(theta, batch, noise).loss;
}

ValueGrad MlpProblem::evaluate(const Vector& theta, std::span<const std::size_t> batch,
                               const NoiseDraw& noise) const {
  Forward fw = forward(theta, batch, noise);
  const auto& dims = config_.layer_dims;
  const auto cols = static_cast<Eigen::Index>(batch.size());

  // d loss / d logits = (softmax - onehot) / batch
  Matrix delta = fw.log_probs.array().exp();
  for (Eigen::Index j = 0; j < cols; ++j) {
    delta(data_.labels[batch[static_cast<std::size_t>(j)]], j) -= 1.0;
  }
  delta /= static_cast<double>(cols);

  Vector grad = Vector::Zero(theta.size());
  Eigen::Index end = theta.size();
  for (std::size_t l = dims.size() - 1; l-- > 0;) {
    const auto in = static_cast<Eigen::Index>(dims[l]);
    const auto out = static_cast<Eigen::Index>(dims[l + 1]);
    const Eigen::Index offset = end - (in * out + out);
    MatrixMap gw(grad.data() + offset, out, in);
    VectorMap gb(grad.data() + offset + in * out, out);
    gw.noalias() = delta * fw.inputs[l].transpose();
    gb = delta.rowwise().sum();
    if (l > 0) {
      ConstMatrixMap w(theta.data() + offset, out, in);
      Matrix upstream = w.transpose() * delta;
      if (!noise.masks.empty()) upstream.array() *= noise.masks[l - 1].array();
      const Matrix& z = fw.pre[l - 1];
      if (config_.activation == Activation::Tanh) {
        upstream.array() *= 1.0 - z.array().tanh().square();
      } else {
        upstream.array() *= (z.array() > 0.0).cast<double>();
      }
      delta = std::move(upstream);
    }
    end = offset;
  }
  return {fw.loss, std::move(grad)};
}

ValueGrad MlpProblem::full_dataset(const Vector& theta) const {
  std::vector<std::size_t> all(data_.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return evaluate(theta, all, NoiseDraw{});
}

Matrix MlpProblem::probabilities(const Vector& theta, std::span<const std::size_t> batch,
                                 const NoiseDraw& noise) const {
  return forward(theta, batch, noise).log_probs.array().exp();
}

double MlpProblem::value(const Vector& theta) const { return evaluate_loss(theta, batch_, noise_); }

Vector MlpProblem::gradient(const Vector& theta) const {
  return evaluate(theta, batch_, noise_).grad;
}

ValueGrad mlp_value_grad(const MlpProblem& p, const Vector& theta,
                         std::span<const std::size_t> batch, const NoiseDraw& noise) {
  return p.evaluate(theta, batch, noise);
}

}  // namespace pal::problems
