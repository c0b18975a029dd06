#include "pal/baselines.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "pal/error.hpp"

namespace pal {

std::string_view to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::SgdMomentum:
      return "sgd";
    case BaselineKind::Adam:
      return "adam";
    case BaselineKind::RmsProp:
      return "rmsprop";
  }
  return "unknown";
}

namespace {

bool unit_interval_open(double x) { return x >= 0.0 && x < 1.0; }

}  // namespace

void BaselineConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidArgument("learning_rate must be positive, got " + std::to_string(learning_rate));
  }
  switch (kind) {
    case BaselineKind::SgdMomentum:
      if (!unit_interval_open(momentum)) {
        throw InvalidArgument("momentum must lie in [0, 1), got " + std::to_string(momentum));
      }
      break;
    case BaselineKind::Adam:
      if (!unit_interval_open(beta1) || !unit_interval_open(beta2)) {
        throw InvalidArgument("beta1 and beta2 must lie in [0, 1)");
      }
      if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
      break;
    case BaselineKind::RmsProp:
      if (!unit_interval_open(discounting)) {
        throw InvalidArgument("discounting must lie in [0, 1), got " + std::to_string(discounting));
      }
      if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
      break;
  }
}

BaselineState BaselineState::initial(Vector theta0, BaselineKind kind) {
  BaselineState state;
  const auto n = theta0.size();
  state.theta = std::move(theta0);
  switch (kind) {
    case BaselineKind::SgdMomentum:
      state.velocity = Vector::Zero(n);
      break;
    case BaselineKind::Adam:
      state.first_moment = Vector::Zero(n);
      state.second_moment = Vector::Zero(n);
      break;
    case BaselineKind::RmsProp:
      state.second_moment = Vector::Zero(n);
      break;
  }
  return state;
}

BaselineStepResult baseline_step(const LossOracle& oracle, BaselineState& state,
                                 const BaselineConfig& cfg) {
  const auto n = state.theta.size();
  if (n != static_cast<Eigen::Index>(oracle.dimension())) {
    throw InvalidArgument("baseline_step: parameter dimension does not match the oracle");
  }

  const double loss = oracle.value(state.theta);
  if (!std::isfinite(loss)) {
    throw Diverged("baseline_step: non-finite loss", state.theta);
  }
  const Vector grad = oracle.gradient(state.theta);
  ++state.t;
  const double lr = cfg.learning_rate;

  switch (cfg.kind) {
    case BaselineKind::SgdMomentum: {
      if (state.velocity.size() != n) throw InvalidArgument("baseline_step: velocity not allocated");
      state.velocity = cfg.momentum * state.velocity + grad;
      state.theta -= lr * state.velocity;
      break;
    }
    case BaselineKind::Adam: {
      if (state.first_moment.size() != n || state.second_moment.size() != n) {
        throw InvalidArgument("baseline_step: Adam moments not allocated");
      }
      state.first_moment = cfg.beta1 * state.first_moment + (1.0 - cfg.beta1) * grad;
      state.second_moment =
          cfg.beta2 * state.second_moment + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
      const double t = static_cast<double>(state.t);
      const double c1 = 1.0 - std::pow(cfg.beta1, t);
      const double c2 = 1.0 - std::pow(cfg.beta2, t);
      const Vector m_hat = state.first_moment / c1;
      const Vector s_hat = state.second_moment / c2;
      state.theta.array() -= lr * m_hat.array() / (s_hat.array().sqrt() + cfg.epsilon);
      break;
    }
    case BaselineKind::RmsProp: {
      if (state.second_moment.size() != n) {
        throw InvalidArgument("baseline_step: RMSProp accumulator not allocated");
      }
      state.second_moment = cfg.discounting * state.second_moment +
                            (1.0 - cfg.discounting) * grad.cwiseProduct(grad);
      state.theta.array() -= lr * grad.array() / (state.second_moment.array() + cfg.epsilon).sqrt();
      break;
    }
  }
  return {state.theta, loss, grad.norm()};
}

}  // namespace pal
