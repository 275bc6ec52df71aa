#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fairadapt {

enum class Gender : char { kMale = 'M', kFemale = 'F' };

std::string gender_name(Gender g);
Gender gender_from_token(const std::string& token);  // "M" / "F"

enum class CorpusTag : char { kSource = 's', kTarget = 't' };

std::string corpus_tag_name(CorpusTag t);
CorpusTag corpus_tag_from_token(const std::string& token);

// One evaluated sample: hard prediction, true binary label, group fields.
struct PredRecord {
  int predicted = 0;  // 0/1
  int label = 0;      // 0/1
  Gender gender = Gender::kMale;
  CorpusTag corpus = CorpusTag::kSource;
};

struct GroupedPredictions {
  std::vector<PredRecord> records;
};

// Unweighted average recall: (TPR + TNR) / 2, optionally restricted to one
// gender. Throws MetricUndefinedError naming the empty class when a class is
// absent after filtering.
double uar(const GroupedPredictions& preds,
           std::optional<Gender> filter = std::nullopt);

// Statistical parity difference: P(pred=1 | M) - P(pred=1 | F).
double delta_sp(const GroupedPredictions& preds);

// Equal-odds difference, aggregated as the signed mean of the TPR and FPR
// gaps: ((TPR_M - TPR_F) + (FPR_M - FPR_F)) / 2. Range [-1, 1].
double delta_eo(const GroupedPredictions& preds);

// Max-of-gaps variant, max(|TPR gap|, |FPR gap|), kept for sensitivity
// comparisons against the mean aggregation.
double delta_eo_max(const GroupedPredictions& preds);

// One (emotion task, corpus) cell of the fairness tables.
struct FairnessCell {
  std::string emotion;
  std::string corpus;  // "source" / "target"
  double uar_overall = 0.0;
  double uar_male = 0.0;
  double uar_female = 0.0;
  double delta_sp_signed = 0.0;
  double delta_eo_signed = 0.0;
  double delta_sp_abs = 0.0;
  double delta_eo_abs = 0.0;
  double delta_eo_max = 0.0;
  std::int64_t n_male = 0;
  std::int64_t n_female = 0;
  std::int64_t n_positive = 0;
  std::int64_t n_negative = 0;
};

FairnessCell build_cell(const GroupedPredictions& preds,
                        const std::string& emotion, const std::string& corpus);

// The machine form of the paper-style tables: cells keyed (emotion, corpus).
struct FairnessReport {
  std::vector<FairnessCell> cells;

  const FairnessCell* find(const std::string& emotion,
                           const std::string& corpus) const;
};

// Build a report from predictions grouped per emotion and corpus.
FairnessReport build_report(
    const std::map<std::string, std::map<std::string, GroupedPredictions>>&
        preds_by_emotion_corpus);

// Field-wise arithmetic mean across repeated runs. All reports must share
// the same cell structure. Signed and abs fields are averaged independently
// (mean of |x_i|, not |mean x_i|).
FairnessReport average_reports(const std::vector<FairnessReport>& reports);

std::string report_to_json_string(const FairnessReport& report);
FairnessReport report_from_json_string(const std::string& text);

}  // namespace fairadapt
