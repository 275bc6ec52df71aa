#pragma once

#include <vector>

#include "fairadapt/matrix.hpp"

namespace fairadapt {

// Weights of the combined objective: total = L_EC + alpha * L_GSim
// - beta * L_GC. The margin belongs to the contrastive term.
struct LossWeights {
  double alpha = 0.5;
  double beta = 0.5;
  double margin_m = 1.0;

  void validate() const;  // alpha, beta >= 0; margin > 0
};

// Mean binary cross-entropy with probabilities clamped to [1e-7, 1-1e-7].
// `weights` (optional, same length) multiplies per-sample terms; the sum is
// divided by the batch size either way. Labels must be 0 or 1.
double bce(const std::vector<double>& probs, const std::vector<double>& labels,
           const std::vector<double>& weights = {});

// Margin contrastive loss for one pair of embeddings.
// y_pair = 0 (same gender): D^2 / 2.  y_pair = 1 (different): max(0, m-D)^2/2
// with D the Euclidean distance between z1 and z2.
double contrastive_gsim(const std::vector<double>& z1,
                        const std::vector<double>& z2, int y_pair,
                        double margin);

// Reported combined loss. Gradient routing of the -beta term is done by the
// GRL junction during training; this is the bookkeeping scalar.
double total_loss(double l_ec, double l_gsim, double l_gc,
                  const LossWeights& w);

}  // namespace fairadapt
