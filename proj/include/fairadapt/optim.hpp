#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fairadapt/matrix.hpp"

namespace fairadapt {

// Adam with decoupled weight decay:
//   m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2
//   theta <- theta - lr_t * (m_hat / (sqrt(v_hat) + eps) + wd * theta)
// decay_mode selects how the configured decay factor is applied:
//   kWeight: wd = decay, lr_t = lr (default reading)
//   kLr:     wd = 0, lr_t = lr / (1 + decay * t)  (inverse-time alternative)
enum class DecayMode { kWeight, kLr };

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double decay = 1e-3;
  DecayMode decay_mode = DecayMode::kWeight;
};

class AdamState {
 public:
  AdamState() = default;
  AdamState(const std::vector<Matrix>& params, AdamConfig config);

  // One update over all managed parameters. Shapes of params/grads must
  // mirror the construction shapes. Non-finite gradients abort the step
  // (NumericError) before any parameter is touched.
  void step(std::vector<Matrix>& params, const std::vector<Matrix>& grads);

  std::int64_t step_count() const { return t_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  std::int64_t t_ = 0;
};

// Tracks the best validation metric seen so far and the parameter snapshot
// that produced it. An epoch counts as an improvement only if it beats the
// best by more than 1e-6, so ties keep the earliest snapshot.
class EarlyStopper {
 public:
  explicit EarlyStopper(int patience) : patience_(patience) {}

  // Returns true while training should continue.
  bool update(int epoch, double metric, const std::vector<Matrix>& params);

  bool has_snapshot() const { return best_epoch_ > 0; }
  int best_epoch() const { return best_epoch_; }
  double best_metric() const { return best_metric_; }
  const std::vector<Matrix>& best_params() const { return best_params_; }

  static constexpr double kMinImprovement = 1e-6;

 private:
  int patience_ = 5;
  int non_improving_ = 0;
  int best_epoch_ = 0;
  double best_metric_ = 0.0;
  std::vector<Matrix> best_params_;
};

}  // namespace fairadapt
