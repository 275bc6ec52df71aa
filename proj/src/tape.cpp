#include "fairadapt/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairadapt/errors.hpp"

namespace fairadapt {

namespace {
bool g_grl_corrupt = false;

double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}
}  // namespace

void set_grl_test_corruption(bool corrupt) { g_grl_corrupt = corrupt; }
bool grl_test_corruption() { return g_grl_corrupt; }

Tape::Ref Tape::push(Node node) {
  grads_ready_ = false;
  nodes_.push_back(std::move(node));
  return Ref{static_cast<std::int32_t>(nodes_.size() - 1)};
}

Tape::Node& Tape::at(Ref r) {
  if (!r.valid() || static_cast<std::size_t>(r.id) >= nodes_.size()) {
    throw ContractError("Tape: invalid node reference");
  }
  return nodes_[static_cast<std::size_t>(r.id)];
}

const Tape::Node& Tape::at(Ref r) const {
  if (!r.valid() || static_cast<std::size_t>(r.id) >= nodes_.size()) {
    throw ContractError("Tape: invalid node reference");
  }
  return nodes_[static_cast<std::size_t>(r.id)];
}

Tape::Ref Tape::leaf(Matrix value) {
  Node n;
  n.op = Op::kLeaf;
  n.value = std::move(value);
  return push(std::move(n));
}

Tape::Ref Tape::matmul(Ref a, Ref b) {
  Node n;
  n.op = Op::kMatmul;
  n.a = a.id;
  n.b = b.id;
  n.value = fairadapt::matmul(at(a).value, at(b).value);
  return push(std::move(n));
}

Tape::Ref Tape::add(Ref a, Ref b) {
  const Matrix& va = at(a).value;
  const Matrix& vb = at(b).value;
  if (!va.same_shape(vb)) {
    throw ShapeError("add: " + va.shape_str() + " vs " + vb.shape_str());
  }
  Node n;
  n.op = Op::kAdd;
  n.a = a.id;
  n.b = b.id;
  Matrix out = va;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += vb.data()[i];
  n.value = std::move(out);
  return push(std::move(n));
}

Tape::Ref Tape::sub(Ref a, Ref b) {
  const Matrix& va = at(a).value;
  const Matrix& vb = at(b).value;
  if (!va.same_shape(vb)) {
    throw ShapeError("sub: " + va.shape_str() + " vs " + vb.shape_str());
  }
  Node n;
  n.op = Op::kSub;
  n.a = a.id;
  n.b = b.id;
  Matrix out = va;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] -= vb.data()[i];
  n.value = std::move(out);
  return push(std::move(n));
}

Tape::Ref Tape::mul(Ref a, Ref b) {
  const Matrix& va = at(a).value;
  const Matrix& vb = at(b).value;
  if (!va.same_shape(vb)) {
    throw ShapeError("mul: " + va.shape_str() + " vs " + vb.shape_str());
  }
  Node n;
  n.op = Op::kMul;
  n.a = a.id;
  n.b = b.id;
  Matrix out = va;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= vb.data()[i];
  n.value = std::move(out);
  return push(std::move(n));
}

Tape::Ref Tape::scale(Ref a, double c) {
  Node n;
  n.op = Op::kScale;
  n.a = a.id;
  n.c = c;
  Matrix out = at(a).value;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= c;
  n.value = std::move(out);
  return push(std::move(n));
}

Tape::Ref Tape::add_bias(Ref x, Ref bias) {
  const Matrix& vx = at(x).value;
  const Matrix& vb = at(bias).value;
  if (vb.rows() != 1 || vb.cols() != vx.cols()) {
    throw ShapeError("add_bias: " + vx.shape_str() + " + " + vb.shape_str());
  }
  Node n;
  n.op = Op::kAddBias;
  n.a = x.id;
  n.b = bias.id;
  Matrix out = vx;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) {
      out(r, c) += vb(0, c);
    }
  }
  n.value = std::move(out);
  return push(std::move(n));
}

Tape::Ref Tape::relu(Ref x) {
  Node n;
  n.op = Op::kRelu;
  n.a = x.id;
  Matrix out = at(x).value;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.data()[i] < 0.0) out.data()[i] = 0.0;
  }
  n.value = std::move(out);
  return push(std::move(n));
}

Tape::Ref Tape::sigmoid(Ref x) {
  Node n;
  n.op = Op::kSigmoid;
  n.a = x.id;
  Matrix out = at(x).value;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data()[i] = stable_sigmoid(out.data()[i]);
  }
  n.value = std::move(out);
  return push(std::move(n));
}

Tape::Ref Tape::grl(Ref x, double grl_scale) {
  if (grl_scale < 0.0) {
    throw ContractError("grl: scale must be nonnegative, got " +
                        std::to_string(grl_scale));
  }
  Node n;
  n.op = Op::kGrl;
  n.a = x.id;
  n.c = grl_scale;
  n.value = at(x).value;  // forward is exact identity
  return push(std::move(n));
}

Tape::Ref Tape::select_rows(Ref x, std::vector<std::int32_t> rows) {
  const Matrix& vx = at(x).value;
  for (std::int32_t r : rows) {
    if (r < 0 || static_cast<std::size_t>(r) >= vx.rows()) {
      throw ContractError("select_rows: index " + std::to_string(r) +
                          " out of range for " + vx.shape_str());
    }
  }
  Node n;
  n.op = Op::kSelectRows;
  n.a = x.id;
  Matrix out(rows.size(), vx.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double* src = vx.data() + static_cast<std::size_t>(rows[i]) * vx.cols();
    std::copy(src, src + vx.cols(), out.data() + i * vx.cols());
  }
  n.indices = std::move(rows);
  n.value = std::move(out);
  return push(std::move(n));
}

Tape::Ref Tape::row_sum(Ref x) {
  const Matrix& vx = at(x).value;
  Node n;
  n.op = Op::kRowSum;
  n.a = x.id;
  Matrix out(vx.rows(), 1);
  for (std::size_t r = 0; r < vx.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < vx.cols(); ++c) acc += vx(r, c);
    out(r, 0) = acc;
  }
  n.value = std::move(out);
  return push(std::move(n));
}

Tape::Ref Tape::bce(Ref p, std::vector<double> labels,
                    std::vector<double> weights) {
  const Matrix& vp = at(p).value;
  const std::size_t nrows = vp.rows();
  if (nrows == 0) {
    throw ContractError("bce: empty batch");
  }
  if (vp.cols() != 1) {
    throw ShapeError("bce: probabilities must be n x 1, got " +
                     vp.shape_str());
  }
  if (labels.size() != nrows) {
    throw ShapeError("bce: " + std::to_string(labels.size()) +
                     " labels for " + std::to_string(nrows) + " probabilities");
  }
  if (!weights.empty() && weights.size() != nrows) {
    throw ShapeError("bce: " + std::to_string(weights.size()) +
                     " weights for " + std::to_string(nrows) + " samples");
  }
  for (double y : labels) {
    if (y != 0.0 && y != 1.0) {
      throw ContractError("bce: labels must be 0 or 1");
    }
  }
  Node n;
  n.op = Op::kBce;
  n.a = p.id;
  double acc = 0.0;
  for (std::size_t i = 0; i < nrows; ++i) {
    const double pc =
        std::min(std::max(vp(i, 0), kProbEps), 1.0 - kProbEps);
    const double term = labels[i] > 0.5 ? -std::log(pc) : -std::log(1.0 - pc);
    acc += (weights.empty() ? 1.0 : weights[i]) * term;
  }
  Matrix out(1, 1);
  out(0, 0) = acc / static_cast<double>(nrows);
  n.aux = std::move(labels);
  n.aux2 = std::move(weights);
  n.value = std::move(out);
  return push(std::move(n));
}

Tape::Ref Tape::contrastive(Ref sqdist, std::vector<std::int32_t> pair_labels,
                            double margin) {
  const Matrix& vd = at(sqdist).value;
  if (vd.cols() != 1) {
    throw ShapeError("contrastive: squared distances must be n x 1, got " +
                     vd.shape_str());
  }
  if (pair_labels.size() != vd.rows()) {
    throw ShapeError("contrastive: " + std::to_string(pair_labels.size()) +
                     " pair labels for " + std::to_string(vd.rows()) +
                     " distances");
  }
  if (vd.rows() == 0) {
    throw ContractError("contrastive: empty pair batch");
  }
  if (margin <= 0.0) {
    throw ContractError("contrastive: margin must be positive");
  }
  Node n;
  n.op = Op::kContrastive;
  n.a = sqdist.id;
  n.c = margin;
  double acc = 0.0;
  for (std::size_t i = 0; i < vd.rows(); ++i) {
    const double d2 = vd(i, 0);
    if (pair_labels[i] == 0) {
      acc += 0.5 * d2;
    } else {
      const double d = std::sqrt(std::max(d2, 0.0));
      const double gap = margin - d;
      if (gap > 0.0) acc += 0.5 * gap * gap;
    }
  }
  Matrix out(1, 1);
  out(0, 0) = acc / static_cast<double>(vd.rows());
  n.indices = std::move(pair_labels);
  n.value = std::move(out);
  return push(std::move(n));
}

void Tape::backward(Ref root) {
  Node& r = at(root);
  if (r.value.rows() != 1 || r.value.cols() != 1) {
    throw ContractError("backward: root must be scalar, got " +
                        r.value.shape_str());
  }
  for (Node& n : nodes_) {
    n.adjoint = Matrix(n.value.rows(), n.value.cols());
  }
  r.adjoint(0, 0) = 1.0;

  for (std::size_t pos = nodes_.size(); pos-- > 0;) {
    Node& n = nodes_[pos];
    const Matrix& g = n.adjoint;
    switch (n.op) {
      case Op::kLeaf:
        break;
      case Op::kMatmul: {
        Node& na = nodes_[static_cast<std::size_t>(n.a)];
        Node& nb = nodes_[static_cast<std::size_t>(n.b)];
        const Matrix da = matmul_nt(g, nb.value);  // g * b^T
        const Matrix db = matmul_tn(na.value, g);  // a^T * g
        for (std::size_t i = 0; i < da.size(); ++i)
          na.adjoint.data()[i] += da.data()[i];
        for (std::size_t i = 0; i < db.size(); ++i)
          nb.adjoint.data()[i] += db.data()[i];
        break;
      }
      case Op::kAdd: {
        Node& na = nodes_[static_cast<std::size_t>(n.a)];
        Node& nb = nodes_[static_cast<std::size_t>(n.b)];
        for (std::size_t i = 0; i < g.size(); ++i) {
          na.adjoint.data()[i] += g.data()[i];
          nb.adjoint.data()[i] += g.data()[i];
        }
        break;
      }
      case Op::kSub: {
        Node& na = nodes_[static_cast<std::size_t>(n.a)];
        Node& nb = nodes_[static_cast<std::size_t>(n.b)];
        for (std::size_t i = 0; i < g.size(); ++i) {
          na.adjoint.data()[i] += g.data()[i];
          nb.adjoint.data()[i] -= g.data()[i];
        }
        break;
      }
      case Op::kMul: {
        Node& na = nodes_[static_cast<std::size_t>(n.a)];
        Node& nb = nodes_[static_cast<std::size_t>(n.b)];
        for (std::size_t i = 0; i < g.size(); ++i) {
          na.adjoint.data()[i] += g.data()[i] * nb.value.data()[i];
          nb.adjoint.data()[i] += g.data()[i] * na.value.data()[i];
        }
        break;
      }
      case Op::kScale: {
        Node& na = nodes_[static_cast<std::size_t>(n.a)];
        for (std::size_t i = 0; i < g.size(); ++i) {
          na.adjoint.data()[i] += n.c * g.data()[i];
        }
        break;
      }
      case Op::kAddBias: {
        Node& na = nodes_[static_cast<std::size_t>(n.a)];
        Node& nb = nodes_[static_cast<std::size_t>(n.b)];
        for (std::size_t i = 0; i < g.size(); ++i) {
          na.adjoint.data()[i] += g.data()[i];
        }
        for (std::size_t r2 = 0; r2 < g.rows(); ++r2) {
          for (std::size_t c2 = 0; c2 < g.cols(); ++c2) {
            nb.adjoint(0, c2) += g(r2, c2);
          }
        }
        break;
      }
      case Op::kRelu: {
        Node& na = nodes_[static_cast<std::size_t>(n.a)];
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (na.value.data()[i] > 0.0) {
            na.adjoint.data()[i] += g.data()[i];
          }
        }
        break;
      }
      case Op::kSigmoid: {
        Node& na = nodes_[static_cast<std::size_t>(n.a)];
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double s = n.value.data()[i];
          na.adjoint.data()[i] += g.data()[i] * s * (1.0 - s);
        }
        break;
      }
      case Op::kGrl: {
        Node& na = nodes_[static_cast<std::size_t>(n.a)];
        const double factor = g_grl_corrupt ? n.c : -n.c;
        for (std::size_t i = 0; i < g.size(); ++i) {
          na.adjoint.data()[i] += factor * g.data()[i];
        }
        break;
      }
      case Op::kSelectRows: {
        Node& na = nodes_[static_cast<std::size_t>(n.a)];
        const std::size_t cols = g.cols();
        for (std::size_t i = 0; i < n.indices.size(); ++i) {
          const std::size_t dst =
              static_cast<std::size_t>(n.indices[i]) * cols;
          for (std::size_t c2 = 0; c2 < cols; ++c2) {
            na.adjoint.data()[dst + c2] += g(i, c2);
          }
        }
        break;
      }
      case Op::kRowSum: {
        Node& na = nodes_[static_cast<std::size_t>(n.a)];
        for (std::size_t r2 = 0; r2 < na.value.rows(); ++r2) {
          const double gr = g(r2, 0);
          for (std::size_t c2 = 0; c2 < na.value.cols(); ++c2) {
            na.adjoint(r2, c2) += gr;
          }
        }
        break;
      }
      case Op::kBce: {
        Node& na = nodes_[static_cast<std::size_t>(n.a)];
        const double gs = g(0, 0);
        const double invn = 1.0 / static_cast<double>(na.value.rows());
        for (std::size_t i = 0; i < na.value.rows(); ++i) {
          const double p = na.value(i, 0);
          // Zero gradient in the clamp region, matching the clamped forward.
          if (p < kProbEps || p > 1.0 - kProbEps) continue;
          const double w = n.aux2.empty() ? 1.0 : n.aux2[i];
          const double d =
              n.aux[i] > 0.5 ? -1.0 / p : 1.0 / (1.0 - p);
          na.adjoint(i, 0) += gs * invn * w * d;
        }
        break;
      }
      case Op::kContrastive: {
        Node& na = nodes_[static_cast<std::size_t>(n.a)];
        const double gs = g(0, 0);
        const double invn = 1.0 / static_cast<double>(na.value.rows());
        for (std::size_t i = 0; i < na.value.rows(); ++i) {
          const double d2 = na.value(i, 0);
          double d_dd2 = 0.0;
          if (n.indices[i] == 0) {
            d_dd2 = 0.5;
          } else if (d2 > 0.0) {
            const double d = std::sqrt(d2);
            const double gap = n.c - d;
            if (gap > 0.0) d_dd2 = -gap * 0.5 / d;
          }
          na.adjoint(i, 0) += gs * invn * d_dd2;
        }
        break;
      }
    }
  }
  grads_ready_ = true;
}

const Matrix& Tape::value(Ref r) const { return at(r).value; }

double Tape::scalar(Ref r) const {
  const Matrix& v = at(r).value;
  if (v.rows() != 1 || v.cols() != 1) {
    throw ContractError("scalar: node is " + v.shape_str() + ", not 1x1");
  }
  return v(0, 0);
}

const Matrix& Tape::grad(Ref r) const {
  if (!grads_ready_) {
    throw ContractError("grad: backward() has not run on this tape");
  }
  return at(r).adjoint;
}

double grad_check(
    const std::function<Tape::Ref(Tape&, const std::vector<Tape::Ref>&)>&
        build,
    const std::vector<Matrix>& theta, double h) {
  auto evaluate = [&](const std::vector<Matrix>& params) {
    Tape tape;
    std::vector<Tape::Ref> refs;
    refs.reserve(params.size());
    for (const Matrix& p : params) refs.push_back(tape.leaf(p));
    const Tape::Ref root = build(tape, refs);
    return tape.scalar(root);
  };

  // Analytic gradient from one backward pass.
  Tape tape;
  std::vector<Tape::Ref> refs;
  refs.reserve(theta.size());
  for (const Matrix& p : theta) refs.push_back(tape.leaf(p));
  const Tape::Ref root = build(tape, refs);
  const double f0 = tape.scalar(root);
  if (!std::isfinite(f0)) {
    throw NumericError("grad_check: function value is non-finite");
  }
  tape.backward(root);
  std::vector<Matrix> analytic;
  analytic.reserve(theta.size());
  for (const Tape::Ref r : refs) analytic.push_back(tape.grad(r));

  double max_err = 0.0;
  std::vector<Matrix> perturbed = theta;
  for (std::size_t pi = 0; pi < theta.size(); ++pi) {
    for (std::size_t i = 0; i < theta[pi].size(); ++i) {
      const double orig = perturbed[pi].data()[i];
      perturbed[pi].data()[i] = orig + h;
      const double fp = evaluate(perturbed);
      perturbed[pi].data()[i] = orig - h;
      const double fm = evaluate(perturbed);
      perturbed[pi].data()[i] = orig;
      if (!std::isfinite(fp) || !std::isfinite(fm)) {
        throw NumericError("grad_check: function value is non-finite");
      }
      const double numeric = (fp - fm) / (2.0 * h);
      const double a = analytic[pi].data()[i];
      const double err = std::abs(a - numeric) / std::max(1.0, std::abs(a));
      max_err = std::max(max_err, err);
    }
  }
  return max_err;
}

}  // namespace fairadapt
