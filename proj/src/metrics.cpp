#include "fairadapt/metrics.hpp"

#include <cmath>

#include <json.hpp>

#include "fairadapt/errors.hpp"

namespace fairadapt {

using nlohmann::json;

std::string gender_name(Gender g) {
  return g == Gender::kMale ? "M" : "F";
}

Gender gender_from_token(const std::string& token) {
  if (token == "M" || token == "m") return Gender::kMale;
  if (token == "F" || token == "f") return Gender::kFemale;
  throw ParseError("unknown gender token '" + token + "'");
}

std::string corpus_tag_name(CorpusTag t) {
  return t == CorpusTag::kSource ? "source" : "target";
}

CorpusTag corpus_tag_from_token(const std::string& token) {
  if (token == "source") return CorpusTag::kSource;
  if (token == "target") return CorpusTag::kTarget;
  throw ParseError("unknown corpus tag '" + token + "'");
}

namespace {

struct Counts {
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::int64_t positives() const { return tp + fn; }
  std::int64_t negatives() const { return tn + fp; }
  std::int64_t total() const { return tp + fp + tn + fn; }
  double tpr() const { return static_cast<double>(tp) / static_cast<double>(positives()); }
  double tnr() const { return static_cast<double>(tn) / static_cast<double>(negatives()); }
  double fpr() const { return static_cast<double>(fp) / static_cast<double>(negatives()); }
  double positive_rate() const {
    return static_cast<double>(tp + fp) / static_cast<double>(total());
  }
};

Counts count(const GroupedPredictions& preds, std::optional<Gender> filter) {
  Counts c;
  for (const PredRecord& r : preds.records) {
    if (filter && r.gender != *filter) continue;
    if (r.label == 1) {
      r.predicted == 1 ? ++c.tp : ++c.fn;
    } else {
      r.predicted == 1 ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

void require_nonempty(const GroupedPredictions& preds, const char* op) {
  if (preds.records.empty()) {
    throw ContractError(std::string(op) + ": empty prediction set");
  }
}

std::pair<Counts, Counts> gender_counts(const GroupedPredictions& preds,
                                        const char* op) {
  const Counts m = count(preds, Gender::kMale);
  const Counts f = count(preds, Gender::kFemale);
  if (m.total() == 0) {
    throw MetricUndefinedError(std::string(op) + ": no samples with gender=M");
  }
  if (f.total() == 0) {
    throw MetricUndefinedError(std::string(op) + ": no samples with gender=F");
  }
  return {m, f};
}

void require_both_rates(const Counts& c, const char* op, const char* group) {
  if (c.positives() == 0) {
    throw MetricUndefinedError(std::string(op) + ": " + group +
                               " has no positive-class samples");
  }
  if (c.negatives() == 0) {
    throw MetricUndefinedError(std::string(op) + ": " + group +
                               " has no negative-class samples");
  }
}

}  // namespace

double uar(const GroupedPredictions& preds, std::optional<Gender> filter) {
  require_nonempty(preds, "uar");
  const Counts c = count(preds, filter);
  const std::string where =
      filter ? " after filtering gender=" + gender_name(*filter) : "";
  if (c.positives() == 0) {
    throw MetricUndefinedError("uar: positive class is empty" + where);
  }
  if (c.negatives() == 0) {
    throw MetricUndefinedError("uar: negative class is empty" + where);
  }
  return (c.tpr() + c.tnr()) / 2.0;
}

double delta_sp(const GroupedPredictions& preds) {
  require_nonempty(preds, "delta_sp");
  const auto [m, f] = gender_counts(preds, "delta_sp");
  return m.positive_rate() - f.positive_rate();
}

double delta_eo(const GroupedPredictions& preds) {
  require_nonempty(preds, "delta_eo");
  const auto [m, f] = gender_counts(preds, "delta_eo");
  require_both_rates(m, "delta_eo", "gender=M");
  require_both_rates(f, "delta_eo", "gender=F");
  return ((m.tpr() - f.tpr()) + (m.fpr() - f.fpr())) / 2.0;
}

double delta_eo_max(const GroupedPredictions& preds) {
  require_nonempty(preds, "delta_eo_max");
  const auto [m, f] = gender_counts(preds, "delta_eo_max");
  require_both_rates(m, "delta_eo_max", "gender=M");
  require_both_rates(f, "delta_eo_max", "gender=F");
  return std::max(std::abs(m.tpr() - f.tpr()), std::abs(m.fpr() - f.fpr()));
}

FairnessCell build_cell(const GroupedPredictions& preds,
                        const std::string& emotion,
                        const std::string& corpus) {
  FairnessCell cell;
  cell.emotion = emotion;
  cell.corpus = corpus;
  cell.uar_overall = uar(preds);
  cell.uar_male = uar(preds, Gender::kMale);
  cell.uar_female = uar(preds, Gender::kFemale);
  cell.delta_sp_signed = delta_sp(preds);
  cell.delta_eo_signed = delta_eo(preds);
  cell.delta_sp_abs = std::abs(cell.delta_sp_signed);
  cell.delta_eo_abs = std::abs(cell.delta_eo_signed);
  cell.delta_eo_max = fairadapt::delta_eo_max(preds);
  const Counts m = count(preds, Gender::kMale);
  const Counts f = count(preds, Gender::kFemale);
  cell.n_male = m.total();
  cell.n_female = f.total();
  cell.n_positive = m.positives() + f.positives();
  cell.n_negative = m.negatives() + f.negatives();
  return cell;
}

const FairnessCell* FairnessReport::find(const std::string& emotion,
                                         const std::string& corpus) const {
  for (const FairnessCell& c : cells) {
    if (c.emotion == emotion && c.corpus == corpus) return &c;
  }
  return nullptr;
}

FairnessReport build_report(
    const std::map<std::string, std::map<std::string, GroupedPredictions>>&
        preds_by_emotion_corpus) {
  FairnessReport report;
  for (const auto& [emotion, by_corpus] : preds_by_emotion_corpus) {
    for (const auto& [corpus, preds] : by_corpus) {
      try {
        report.cells.push_back(build_cell(preds, emotion, corpus));
      } catch (const MetricUndefinedError& e) {
        throw MetricUndefinedError("cell (" + emotion + ", " + corpus +
                                   "): " + e.what());
      }
    }
  }
  return report;
}

FairnessReport average_reports(const std::vector<FairnessReport>& reports) {
  if (reports.empty()) {
    throw ContractError("average_reports: no reports");
  }
  const std::size_t n_cells = reports.front().cells.size();
  for (const FairnessReport& r : reports) {
    if (r.cells.size() != n_cells) {
      throw ContractError("average_reports: reports have differing cells");
    }
  }
  FairnessReport out = reports.front();
  const double inv = 1.0 / static_cast<double>(reports.size());
  for (std::size_t c = 0; c < n_cells; ++c) {
    auto mean_of = [&](double FairnessCell::* field) {
      double acc = 0.0;
      for (const FairnessReport& r : reports) {
        const FairnessCell& cell = r.cells[c];
        if (cell.emotion != out.cells[c].emotion ||
            cell.corpus != out.cells[c].corpus) {
          throw ContractError("average_reports: cell order mismatch");
        }
        acc += cell.*field;
      }
      return acc * inv;
    };
    FairnessCell& cell = out.cells[c];
    cell.uar_overall = mean_of(&FairnessCell::uar_overall);
    cell.uar_male = mean_of(&FairnessCell::uar_male);
    cell.uar_female = mean_of(&FairnessCell::uar_female);
    cell.delta_sp_signed = mean_of(&FairnessCell::delta_sp_signed);
    cell.delta_eo_signed = mean_of(&FairnessCell::delta_eo_signed);
    cell.delta_sp_abs = mean_of(&FairnessCell::delta_sp_abs);
    cell.delta_eo_abs = mean_of(&FairnessCell::delta_eo_abs);
    cell.delta_eo_max = mean_of(&FairnessCell::delta_eo_max);
  }
  return out;
}

namespace {

json cell_to_json(const FairnessCell& c) {
  return json{{"emotion", c.emotion},
              {"corpus", c.corpus},
              {"uar_overall", c.uar_overall},
              {"uar_male", c.uar_male},
              {"uar_female", c.uar_female},
              {"delta_sp_signed", c.delta_sp_signed},
              {"delta_eo_signed", c.delta_eo_signed},
              {"delta_sp_abs", c.delta_sp_abs},
              {"delta_eo_abs", c.delta_eo_abs},
              {"delta_eo_max", c.delta_eo_max},
              {"n_male", c.n_male},
              {"n_female", c.n_female},
              {"n_positive", c.n_positive},
              {"n_negative", c.n_negative}};
}

FairnessCell cell_from_json(const json& j) {
  FairnessCell c;
  c.emotion = j.at("emotion").get<std::string>();
  c.corpus = j.at("corpus").get<std::string>();
  c.uar_overall = j.at("uar_overall").get<double>();
  c.uar_male = j.at("uar_male").get<double>();
  c.uar_female = j.at("uar_female").get<double>();
  c.delta_sp_signed = j.at("delta_sp_signed").get<double>();
  c.delta_eo_signed = j.at("delta_eo_signed").get<double>();
  c.delta_sp_abs = j.at("delta_sp_abs").get<double>();
  c.delta_eo_abs = j.at("delta_eo_abs").get<double>();
  c.delta_eo_max = j.at("delta_eo_max").get<double>();
  c.n_male = j.at("n_male").get<std::int64_t>();
  c.n_female = j.at("n_female").get<std::int64_t>();
  c.n_positive = j.at("n_positive").get<std::int64_t>();
  c.n_negative = j.at("n_negative").get<std::int64_t>();
  return c;
}

}  // namespace

std::string report_to_json_string(const FairnessReport& report) {
  json cells = json::array();
  for (const FairnessCell& c : report.cells) cells.push_back(cell_to_json(c));
  return json{{"cells", std::move(cells)}}.dump();
}

FairnessReport report_from_json_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("report parse failure: ") + e.what());
  }
  FairnessReport report;
  try {
    for (const auto& cj : doc.at("cells")) {
      report.cells.push_back(cell_from_json(cj));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("report: missing or bad field: ") + e.what());
  }
  return report;
}

}  // namespace fairadapt
