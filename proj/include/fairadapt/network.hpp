#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fairadapt/matrix.hpp"
#include "fairadapt/tape.hpp"

namespace fairadapt {

enum class Activation { kRelu, kSigmoid, kNone };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct LayerSpec {
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  Activation activation = Activation::kNone;
};

// Shared encoder producing the embedding z, an emotion head and a gender
// head, with the gender head attached through a gradient-reversal junction
// of strength grl_scale.
struct ModelSpec {
  std::vector<LayerSpec> encoder;
  std::vector<LayerSpec> emotion_head;
  std::vector<LayerSpec> gender_head;
  double grl_scale = 0.5;

  std::size_t input_dim() const { return encoder.front().input_dim; }
  std::size_t embedding_dim() const { return encoder.back().output_dim; }
  void validate() const;  // throws ShapeError/ContractError
};

// Default topology: encoder d -> 256 -> 128 -> 64 -> 32 (ReLU),
// emotion head 32 -> 1 (sigmoid), gender head 32 -> 16 -> 1 (sigmoid).
// Hidden widths are configurable through the overload.
ModelSpec default_model_spec(std::size_t feature_dim, double grl_scale);
ModelSpec make_model_spec(std::size_t feature_dim,
                          const std::vector<std::size_t>& encoder_hidden,
                          const std::vector<std::size_t>& gender_hidden,
                          double grl_scale);

// Parameter refs of one model inserted into a tape, grouped per component.
struct TapeParams {
  std::vector<Tape::Ref> encoder;   // W0, b0, W1, b1, ...
  std::vector<Tape::Ref> emotion;
  std::vector<Tape::Ref> gender;
};

class CfaModel {
 public:
  CfaModel() = default;

  // Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases.
  // Bit-identical for identical (spec, seed).
  static CfaModel init(const ModelSpec& spec, std::uint64_t seed);

  const ModelSpec& spec() const { return spec_; }

  // Flat parameter list in fixed order: encoder W/b pairs, emotion head W/b
  // pairs, gender head W/b pairs. The order is the checkpoint layout and the
  // optimizer slot order.
  std::vector<Matrix>& parameters() { return params_; }
  const std::vector<Matrix>& parameters() const { return params_; }
  std::size_t encoder_param_count() const { return enc_count_; }
  std::size_t emotion_param_count() const { return emo_count_; }
  std::size_t gender_param_count() const { return gen_count_; }

  // Tape-recorded forward passes used for training.
  TapeParams insert_params(Tape& tape) const;
  Tape::Ref encode_on(Tape& tape, const TapeParams& p, Tape::Ref x) const;
  Tape::Ref emotion_on(Tape& tape, const TapeParams& p, Tape::Ref z) const;
  // Applies the GRL junction (scale override < 0 means spec grl_scale).
  Tape::Ref gender_on(Tape& tape, const TapeParams& p, Tape::Ref z,
                      double grl_scale_override = -1.0) const;

  // Inference entry points. x is [n, input_dim]; all probabilities in (0,1).
  Matrix encode(const Matrix& x) const;
  std::pair<Matrix, Matrix> forward_ec(const Matrix& x) const;  // (z, p)
  Matrix forward_gc(const Matrix& z) const;                     // p_gender

  void save(const std::string& path) const;
  static CfaModel load(const std::string& path);

  std::string to_json_string() const;
  static CfaModel from_json_string(const std::string& text);

  bool operator==(const CfaModel& other) const {
    return params_ == other.params_;
  }

 private:
  static Tape::Ref run_layers(Tape& tape, const std::vector<LayerSpec>& specs,
                              const std::vector<Tape::Ref>& params,
                              Tape::Ref x);

  ModelSpec spec_;
  std::vector<Matrix> params_;
  std::size_t enc_count_ = 0;
  std::size_t emo_count_ = 0;
  std::size_t gen_count_ = 0;
};

// Forward identity / backward sign-flip junction as a plain vector op, for
// callers that want the rule outside a tape. downstream = -scale * upstream.
std::vector<double> grl_backward(const std::vector<double>& upstream,
                                 double scale);

}  // namespace fairadapt
