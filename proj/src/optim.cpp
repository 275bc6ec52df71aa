#include "fairadapt/optim.hpp"

#include <cmath>
#include <string>

#include "fairadapt/errors.hpp"

namespace fairadapt {

AdamState::AdamState(const std::vector<Matrix>& params, AdamConfig config)
    : config_(config) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const Matrix& p : params) {
    m_.emplace_back(p.rows(), p.cols());
    v_.emplace_back(p.rows(), p.cols());
  }
}

void AdamState::step(std::vector<Matrix>& params,
                     const std::vector<Matrix>& grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw ShapeError("adam_step: expected " + std::to_string(m_.size()) +
                     " parameter tensors, got " + std::to_string(params.size()) +
                     " params / " + std::to_string(grads.size()) + " grads");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!params[i].same_shape(m_[i]) || !grads[i].same_shape(m_[i])) {
      throw ShapeError("adam_step: tensor " + std::to_string(i) +
                       " shape mismatch (state " + m_[i].shape_str() +
                       ", param " + params[i].shape_str() + ", grad " +
                       grads[i].shape_str() + ")");
    }
    if (!grads[i].all_finite()) {
      throw NumericError("adam_step: non-finite gradient in tensor " +
                         std::to_string(i) + "; step aborted");
    }
  }

  ++t_;
  const double tstep = static_cast<double>(t_);
  const double bc1 = 1.0 - std::pow(config_.beta1, tstep);
  const double bc2 = 1.0 - std::pow(config_.beta2, tstep);
  const double wd = config_.decay_mode == DecayMode::kWeight ? config_.decay : 0.0;
  const double lr = config_.decay_mode == DecayMode::kLr
                        ? config_.lr / (1.0 + config_.decay * tstep)
                        : config_.lr;

  for (std::size_t i = 0; i < params.size(); ++i) {
    double* theta = params[i].data();
    const double* g = grads[i].data();
    double* m = m_[i].data();
    double* v = v_[i].data();
    for (std::size_t k = 0; k < params[i].size(); ++k) {
      m[k] = config_.beta1 * m[k] + (1.0 - config_.beta1) * g[k];
      v[k] = config_.beta2 * v[k] + (1.0 - config_.beta2) * g[k] * g[k];
      const double m_hat = m[k] / bc1;
      const double v_hat = v[k] / bc2;
      theta[k] -= lr * (m_hat / (std::sqrt(v_hat) + config_.eps) + wd * theta[k]);
    }
    params[i].require_finite("adam_step: parameter tensor " +
                             std::to_string(i) + " after update");
  }
}

bool EarlyStopper::update(int epoch, double metric,
                          const std::vector<Matrix>& params) {
  if (!std::isfinite(metric)) {
    throw NumericError("early_stop: non-finite validation metric at epoch " +
                       std::to_string(epoch));
  }
  if (best_epoch_ == 0 || metric > best_metric_ + kMinImprovement) {
    best_metric_ = metric;
    best_epoch_ = epoch;
    best_params_ = params;
    non_improving_ = 0;
    return true;
  }
  ++non_improving_;
  return non_improving_ < patience_;
}

}  // namespace fairadapt
