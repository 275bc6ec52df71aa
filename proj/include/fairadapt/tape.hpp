#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fairadapt/matrix.hpp"

namespace fairadapt {

// Reverse-mode autodiff tape. Values are computed eagerly as operations are
// recorded; backward() replays the recorded ops in reverse, accumulating
// adjoints. A tape is confined to a single training step; parameters are
// re-inserted as leaves each step and their adjoints read back afterwards.
class Tape {
 public:
  struct Ref {
    std::int32_t id = -1;
    bool valid() const { return id >= 0; }
  };

  Ref leaf(Matrix value);

  // x[n,k] * w[k,m] -> [n,m]
  Ref matmul(Ref a, Ref b);
  // elementwise; shapes must match
  Ref add(Ref a, Ref b);
  Ref sub(Ref a, Ref b);
  Ref mul(Ref a, Ref b);
  Ref scale(Ref a, double c);
  // x[n,k] + bias[1,k] broadcast over rows
  Ref add_bias(Ref x, Ref bias);
  Ref relu(Ref x);
  // numerically stable branch form; output strictly in (0,1)
  Ref sigmoid(Ref x);
  // gradient reversal: forward identity, backward multiplies by -grl_scale
  Ref grl(Ref x, double grl_scale);
  // gather rows; backward scatter-adds
  Ref select_rows(Ref x, std::vector<std::int32_t> rows);
  // [n,k] -> [n,1]
  Ref row_sum(Ref x);

  // Mean binary cross-entropy over the batch, with probabilities clamped to
  // [kProbEps, 1-kProbEps] before the logs. `weights` (optional) multiplies
  // per-sample terms; the reduction divides by the batch size either way.
  // p must be [n,1]; labels in {0,1}. Output is scalar [1,1].
  Ref bce(Ref p, std::vector<double> labels, std::vector<double> weights = {});

  // Mean margin contrastive loss over pairs, from squared distances [n,1].
  // pair_labels: 0 = same gender (pull), 1 = different gender (push).
  // Per pair: (1-y) * D^2/2 + y * max(0, m - D)^2 / 2.
  // The pull branch differentiates D^2 directly (no sqrt); the push branch
  // defines the gradient as 0 at D = 0.
  Ref contrastive(Ref sqdist, std::vector<std::int32_t> pair_labels,
                  double margin);

  // Accumulates d(root)/d(node) for every node. Root must be 1x1.
  void backward(Ref root);

  const Matrix& value(Ref r) const;
  double scalar(Ref r) const;  // value of a 1x1 node
  // Adjoint after backward(); zero matrix for nodes the root does not reach.
  const Matrix& grad(Ref r) const;

  std::size_t size() const { return nodes_.size(); }

  static constexpr double kProbEps = 1e-7;

 private:
  enum class Op : std::uint8_t {
    kLeaf,
    kMatmul,
    kAdd,
    kSub,
    kMul,
    kScale,
    kAddBias,
    kRelu,
    kSigmoid,
    kGrl,
    kSelectRows,
    kRowSum,
    kBce,
    kContrastive,
  };

  struct Node {
    Op op;
    std::int32_t a = -1;
    std::int32_t b = -1;
    double c = 0.0;                    // scale factor / GRL scale / margin
    std::vector<std::int32_t> indices; // select_rows targets, pair labels
    std::vector<double> aux;           // labels
    std::vector<double> aux2;          // weights
    Matrix value;
    Matrix adjoint;
  };

  Ref push(Node node);
  Node& at(Ref r);
  const Node& at(Ref r) const;

  std::vector<Node> nodes_;
  bool grads_ready_ = false;
};

// Test hook: flips the sign applied by the GRL backward rule so the selftest
// can demonstrate that a corrupted reversal is caught. Never set outside
// selftest negative paths.
void set_grl_test_corruption(bool corrupt);
bool grl_test_corruption();

// Max over coordinates of |analytic - central difference| / max(1, |analytic|)
// for the scalar expression produced by `build`. `build` must record the same
// computation for any parameter values (a fresh tape is created per
// evaluation). Throws NumericError if the function evaluates non-finite.
double grad_check(
    const std::function<Tape::Ref(Tape&, const std::vector<Tape::Ref>&)>&
        build,
    const std::vector<Matrix>& theta, double h);

}  // namespace fairadapt
