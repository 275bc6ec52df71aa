#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fairadapt/metrics.hpp"

namespace fairadapt {

enum class Split : char { kTrain = 'r', kValid = 'v', kTest = 't' };

std::string split_name(Split s);
Split split_from_token(const std::string& token);

// The four emotion categories carried by the corpus files. Binary tasks pick
// one as the positive class at task-selection time.
inline const std::array<std::string, 4> kEmotionCategories = {
    "neutral", "happiness", "anger", "sadness"};

bool is_known_emotion(const std::string& name);

struct Sample {
  std::string id;
  CorpusTag corpus = CorpusTag::kSource;
  Split split = Split::kTrain;
  Gender gender = Gender::kMale;
  std::string emotion;                // one of kEmotionCategories
  std::vector<double> features;
};

// Immutable after load/generation; samples ordered by id.
class Corpus {
 public:
  Corpus() = default;
  Corpus(std::vector<Sample> samples, std::size_t feature_dim);

  const std::vector<Sample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  std::size_t feature_dim() const { return feature_dim_; }

  // Indices of samples in the given split.
  std::vector<std::int32_t> split_indices(Split s) const;

  // 1 if the sample's emotion equals `task`, else 0.
  int binary_label(std::size_t index, const std::string& task) const;

 private:
  std::vector<Sample> samples_;
  std::size_t feature_dim_ = 0;
};

// CSV schema: header `id,corpus,split,gender,emotion,f0..f{D-1}`, UTF-8,
// '.' decimal. Parse errors name the offending row number (1-based, header
// is row 1).
Corpus load_corpus(const std::string& path);
void save_corpus(const Corpus& corpus, const std::string& path);

// Controls the paired synthetic corpora standing in for the two podcast
// datasets. Features are Gaussian clusters separated along a label axis;
// bias_strength shifts genders apart (correlated with the label axis inside
// the positive class), and the target corpus is rotated and offset by
// domain_shift.
struct SynthSpec {
  std::size_t n_per_corpus = 2000;
  std::size_t feature_dim = 32;
  double emotion_prevalence = 0.5;  // probability of the positive emotion
  double gender_balance = 0.5;      // probability of gender M
  double bias_strength = 0.0;
  double domain_shift = 0.0;
  double noise_sigma = 0.6;
  std::string positive_emotion = "anger";
  std::uint64_t seed = 0;

  void validate() const;
  std::string to_json_string() const;
  static SynthSpec from_json_string(const std::string& text);
};

struct SynthResult {
  Corpus source;
  Corpus target;
};

SynthResult synth_corpus(const SynthSpec& spec);

// Kamiran-Calders reweighing over the train split:
// w(gender, label) = N(gender) * N(label) / (N * N(gender, label)).
// Keys are (gender, binary label). Throws on an empty cell.
std::map<std::pair<Gender, int>, double> reweigh_weights(
    const Corpus& corpus, const std::string& task);

// A batch mixing both corpora: index lists into the respective sample arrays.
struct MixedBatch {
  std::vector<std::int32_t> source_idx;
  std::vector<std::int32_t> target_idx;
};

// One epoch of half/half mixed batches over the train splits. An epoch makes
// one pass over the larger corpus (the final short chunk is topped up with
// uniformly redrawn samples so every batch is exactly half/half); the smaller
// corpus is resampled by cycling reshuffles. Deterministic per (seed, epoch).
std::vector<MixedBatch> mixed_batches(const Corpus& source,
                                      const Corpus& target,
                                      std::size_t batch_size,
                                      std::uint64_t seed, std::uint64_t epoch);

struct Pair {
  std::int32_t source_index = 0;  // into source.samples()
  std::int32_t target_index = 0;  // into target.samples()
  std::int32_t y_pair = 0;        // 0 same gender, 1 different gender
};

struct PairBatch {
  std::vector<Pair> pairs;
};

// Pairs every source sample of the batch with one uniformly drawn target
// sample from the same batch; y_pair = 0 iff genders match.
PairBatch sample_pairs(const Corpus& source, const Corpus& target,
                       const MixedBatch& batch, std::uint64_t seed);

}  // namespace fairadapt
