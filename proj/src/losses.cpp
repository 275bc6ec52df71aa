#include "fairadapt/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairadapt/errors.hpp"
#include "fairadapt/tape.hpp"

namespace fairadapt {

void LossWeights::validate() const {
  if (alpha < 0.0 || beta < 0.0) {
    throw ContractError("LossWeights: alpha and beta must be nonnegative");
  }
  if (!(margin_m > 0.0)) {
    throw ContractError("LossWeights: margin must be positive");
  }
}

double bce(const std::vector<double>& probs, const std::vector<double>& labels,
           const std::vector<double>& weights) {
  if (probs.empty()) {
    throw ContractError("bce: empty batch");
  }
  if (labels.size() != probs.size()) {
    throw ShapeError("bce: " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(probs.size()) + " probabilities");
  }
  if (!weights.empty() && weights.size() != probs.size()) {
    throw ShapeError("bce: " + std::to_string(weights.size()) +
                     " weights for " + std::to_string(probs.size()) +
                     " samples");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (labels[i] != 0.0 && labels[i] != 1.0) {
      throw ContractError("bce: labels must be 0 or 1");
    }
    const double pc =
        std::min(std::max(probs[i], Tape::kProbEps), 1.0 - Tape::kProbEps);
    const double term =
        labels[i] > 0.5 ? -std::log(pc) : -std::log(1.0 - pc);
    acc += (weights.empty() ? 1.0 : weights[i]) * term;
  }
  return acc / static_cast<double>(probs.size());
}

double contrastive_gsim(const std::vector<double>& z1,
                        const std::vector<double>& z2, int y_pair,
                        double margin) {
  if (z1.size() != z2.size()) {
    throw ShapeError("contrastive_gsim: embedding dims " +
                     std::to_string(z1.size()) + " vs " +
                     std::to_string(z2.size()));
  }
  if (!(margin > 0.0)) {
    throw ContractError("contrastive_gsim: margin must be positive");
  }
  double d2 = 0.0;
  for (std::size_t i = 0; i < z1.size(); ++i) {
    const double d = z1[i] - z2[i];
    d2 += d * d;
  }
  if (y_pair == 0) {
    return 0.5 * d2;
  }
  const double gap = margin - std::sqrt(d2);
  return gap > 0.0 ? 0.5 * gap * gap : 0.0;
}

double total_loss(double l_ec, double l_gsim, double l_gc,
                  const LossWeights& w) {
  w.validate();
  if (!std::isfinite(l_ec) || !std::isfinite(l_gsim) || !std::isfinite(l_gc)) {
    throw NumericError("total_loss: non-finite component");
  }
  return l_ec + w.alpha * l_gsim - w.beta * l_gc;
}

}  // namespace fairadapt
