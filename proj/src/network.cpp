#include "fairadapt/network.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fairadapt/errors.hpp"
#include "fairadapt/rng.hpp"

namespace fairadapt {

using nlohmann::json;

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::kRelu: return "relu";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kNone: return "none";
  }
  return "none";
}

Activation activation_from_name(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "none") return Activation::kNone;
  throw ParseError("unknown activation '" + name + "'");
}

void ModelSpec::validate() const {
  if (encoder.empty() || emotion_head.empty() || gender_head.empty()) {
    throw ContractError("ModelSpec: all three components need layers");
  }
  if (grl_scale < 0.0) {
    throw ContractError("ModelSpec: grl_scale must be nonnegative");
  }
  auto check_chain = [](const std::vector<LayerSpec>& layers,
                        const std::string& name) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
      if (layers[i].input_dim < 1 || layers[i].output_dim < 1) {
        throw ContractError("ModelSpec: " + name + " layer " +
                            std::to_string(i) + " has dim < 1");
      }
      if (i > 0 && layers[i].input_dim != layers[i - 1].output_dim) {
        throw ShapeError("ModelSpec: " + name + " layer " + std::to_string(i) +
                         " input " + std::to_string(layers[i].input_dim) +
                         " != previous output " +
                         std::to_string(layers[i - 1].output_dim));
      }
    }
  };
  check_chain(encoder, "encoder");
  check_chain(emotion_head, "emotion_head");
  check_chain(gender_head, "gender_head");
  const std::size_t z = encoder.back().output_dim;
  if (emotion_head.front().input_dim != z ||
      gender_head.front().input_dim != z) {
    throw ShapeError("ModelSpec: heads must consume the embedding dim " +
                     std::to_string(z));
  }
  if (emotion_head.back().output_dim != 1 ||
      gender_head.back().output_dim != 1) {
    throw ShapeError("ModelSpec: heads must end in a single unit");
  }
}

ModelSpec make_model_spec(std::size_t feature_dim,
                          const std::vector<std::size_t>& encoder_hidden,
                          const std::vector<std::size_t>& gender_hidden,
                          double grl_scale) {
  ModelSpec spec;
  spec.grl_scale = grl_scale;
  std::size_t prev = feature_dim;
  for (std::size_t width : encoder_hidden) {
    spec.encoder.push_back({prev, width, Activation::kRelu});
    prev = width;
  }
  spec.emotion_head.push_back({prev, 1, Activation::kSigmoid});
  std::size_t gprev = prev;
  for (std::size_t width : gender_hidden) {
    spec.gender_head.push_back({gprev, width, Activation::kRelu});
    gprev = width;
  }
  spec.gender_head.push_back({gprev, 1, Activation::kSigmoid});
  spec.validate();
  return spec;
}

ModelSpec default_model_spec(std::size_t feature_dim, double grl_scale) {
  return make_model_spec(feature_dim, {256, 128, 64, 32}, {16}, grl_scale);
}

CfaModel CfaModel::init(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  CfaModel model;
  model.spec_ = spec;
  Rng rng(derive_seed(seed, seed_tag::kInit));
  auto init_layers = [&](const std::vector<LayerSpec>& layers) {
    std::size_t count = 0;
    for (const LayerSpec& l : layers) {
      const double bound =
          std::sqrt(6.0 / static_cast<double>(l.input_dim + l.output_dim));
      Matrix w(l.input_dim, l.output_dim);
      for (std::size_t i = 0; i < w.size(); ++i) {
        w.data()[i] = rng.uniform(-bound, bound);
      }
      model.params_.push_back(std::move(w));
      model.params_.push_back(Matrix(1, l.output_dim));  // zero bias
      count += 2;
    }
    return count;
  };
  model.enc_count_ = init_layers(spec.encoder);
  model.emo_count_ = init_layers(spec.emotion_head);
  model.gen_count_ = init_layers(spec.gender_head);
  return model;
}

TapeParams CfaModel::insert_params(Tape& tape) const {
  TapeParams refs;
  std::size_t i = 0;
  for (; i < enc_count_; ++i) refs.encoder.push_back(tape.leaf(params_[i]));
  for (; i < enc_count_ + emo_count_; ++i)
    refs.emotion.push_back(tape.leaf(params_[i]));
  for (; i < params_.size(); ++i) refs.gender.push_back(tape.leaf(params_[i]));
  return refs;
}

Tape::Ref CfaModel::run_layers(Tape& tape, const std::vector<LayerSpec>& specs,
                               const std::vector<Tape::Ref>& params,
                               Tape::Ref x) {
  Tape::Ref h = x;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    h = tape.add_bias(tape.matmul(h, params[2 * i]), params[2 * i + 1]);
    switch (specs[i].activation) {
      case Activation::kRelu: h = tape.relu(h); break;
      case Activation::kSigmoid: h = tape.sigmoid(h); break;
      case Activation::kNone: break;
    }
  }
  return h;
}

Tape::Ref CfaModel::encode_on(Tape& tape, const TapeParams& p,
                              Tape::Ref x) const {
  if (tape.value(x).cols() != spec_.input_dim()) {
    throw ShapeError("encode: input is " + tape.value(x).shape_str() +
                     ", expected " + std::to_string(spec_.input_dim()) +
                     " columns");
  }
  return run_layers(tape, spec_.encoder, p.encoder, x);
}

Tape::Ref CfaModel::emotion_on(Tape& tape, const TapeParams& p,
                               Tape::Ref z) const {
  return run_layers(tape, spec_.emotion_head, p.emotion, z);
}

Tape::Ref CfaModel::gender_on(Tape& tape, const TapeParams& p, Tape::Ref z,
                              double grl_scale_override) const {
  const double scale =
      grl_scale_override >= 0.0 ? grl_scale_override : spec_.grl_scale;
  return run_layers(tape, spec_.gender_head, p.gender, tape.grl(z, scale));
}

Matrix CfaModel::encode(const Matrix& x) const {
  Tape tape;
  const TapeParams p = insert_params(tape);
  return tape.value(encode_on(tape, p, tape.leaf(x)));
}

std::pair<Matrix, Matrix> CfaModel::forward_ec(const Matrix& x) const {
  Tape tape;
  const TapeParams p = insert_params(tape);
  const Tape::Ref z = encode_on(tape, p, tape.leaf(x));
  const Tape::Ref prob = emotion_on(tape, p, z);
  return {tape.value(z), tape.value(prob)};
}

Matrix CfaModel::forward_gc(const Matrix& z) const {
  if (z.cols() != spec_.embedding_dim()) {
    throw ShapeError("forward_gc: embedding is " + z.shape_str() +
                     ", expected " + std::to_string(spec_.embedding_dim()) +
                     " columns");
  }
  Tape tape;
  const TapeParams p = insert_params(tape);
  return tape.value(gender_on(tape, p, tape.leaf(z)));
}

namespace {

json layers_to_json(const std::vector<LayerSpec>& layers) {
  json out = json::array();
  for (const LayerSpec& l : layers) {
    out.push_back({{"input_dim", l.input_dim},
                   {"output_dim", l.output_dim},
                   {"activation", activation_name(l.activation)}});
  }
  return out;
}

std::vector<LayerSpec> layers_from_json(const json& j) {
  std::vector<LayerSpec> out;
  for (const auto& l : j) {
    out.push_back({l.at("input_dim").get<std::size_t>(),
                   l.at("output_dim").get<std::size_t>(),
                   activation_from_name(l.at("activation").get<std::string>())});
  }
  return out;
}

constexpr int kCheckpointVersion = 1;

}  // namespace

std::string CfaModel::to_json_string() const {
  json doc;
  doc["format_version"] = kCheckpointVersion;
  doc["spec"] = {{"encoder", layers_to_json(spec_.encoder)},
                 {"emotion_head", layers_to_json(spec_.emotion_head)},
                 {"gender_head", layers_to_json(spec_.gender_head)},
                 {"grl_scale", spec_.grl_scale}};
  json params = json::array();
  for (const Matrix& m : params_) {
    params.push_back(
        {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.values()}});
  }
  doc["params"] = std::move(params);
  return doc.dump();
}

CfaModel CfaModel::from_json_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint parse failure: ") + e.what());
  }
  try {
    if (doc.at("format_version").get<int>() != kCheckpointVersion) {
      throw ParseError("checkpoint: unsupported format_version");
    }
    CfaModel model;
    const json& s = doc.at("spec");
    model.spec_.encoder = layers_from_json(s.at("encoder"));
    model.spec_.emotion_head = layers_from_json(s.at("emotion_head"));
    model.spec_.gender_head = layers_from_json(s.at("gender_head"));
    model.spec_.grl_scale = s.at("grl_scale").get<double>();
    model.spec_.validate();
    for (const auto& pj : doc.at("params")) {
      model.params_.emplace_back(pj.at("rows").get<std::size_t>(),
                                 pj.at("cols").get<std::size_t>(),
                                 pj.at("data").get<std::vector<double>>());
    }
    model.enc_count_ = 2 * model.spec_.encoder.size();
    model.emo_count_ = 2 * model.spec_.emotion_head.size();
    model.gen_count_ = 2 * model.spec_.gender_head.size();
    if (model.params_.size() !=
        model.enc_count_ + model.emo_count_ + model.gen_count_) {
      throw ParseError("checkpoint: parameter count does not match spec");
    }
    return model;
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint: missing or bad field: ") +
                     e.what());
  }
}

void CfaModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open checkpoint for writing: " + path);
  }
  out << to_json_string();
  if (!out) {
    throw IoError("failed writing checkpoint: " + path);
  }
}

CfaModel CfaModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open checkpoint: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_string(buf.str());
}

std::vector<double> grl_backward(const std::vector<double>& upstream,
                                 double scale) {
  if (scale < 0.0) {
    throw ContractError("grl_backward: scale must be nonnegative");
  }
  std::vector<double> out(upstream.size());
  for (std::size_t i = 0; i < upstream.size(); ++i) {
    out[i] = -scale * upstream[i];
  }
  return out;
}

}  // namespace fairadapt
