#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fairadapt/data.hpp"
#include "fairadapt/errors.hpp"

namespace fairadapt {

std::string split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
  }
  return "train";
}

Split split_from_token(const std::string& token) {
  if (token == "train") return Split::kTrain;
  if (token == "valid") return Split::kValid;
  if (token == "test") return Split::kTest;
  throw ParseError("unknown split token '" + token + "'");
}

bool is_known_emotion(const std::string& name) {
  return std::find(kEmotionCategories.begin(), kEmotionCategories.end(),
                   name) != kEmotionCategories.end();
}

Corpus::Corpus(std::vector<Sample> samples, std::size_t feature_dim)
    : samples_(std::move(samples)), feature_dim_(feature_dim) {
  for (const Sample& s : samples_) {
    if (s.features.size() != feature_dim_) {
      throw ShapeError("Corpus: sample '" + s.id + "' has " +
                       std::to_string(s.features.size()) +
                       " features, expected " + std::to_string(feature_dim_));
    }
  }
  std::sort(samples_.begin(), samples_.end(),
            [](const Sample& a, const Sample& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    if (samples_[i].id == samples_[i - 1].id) {
      throw ContractError("Corpus: duplicate sample id '" + samples_[i].id +
                          "'");
    }
  }
}

std::vector<std::int32_t> Corpus::split_indices(Split s) const {
  std::vector<std::int32_t> out;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (samples_[i].split == s) out.push_back(static_cast<std::int32_t>(i));
  }
  return out;
}

int Corpus::binary_label(std::size_t index, const std::string& task) const {
  return samples_[index].emotion == task ? 1 : 0;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& token, std::size_t row,
                    const std::string& what) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{} || result.ptr != end) {
    throw ParseError("row " + std::to_string(row) + ": bad " + what + " '" +
                     token + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError("row " + std::to_string(row) + ": non-finite " + what +
                     " '" + token + "'");
  }
  return value;
}

}  // namespace

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open corpus file: " + path);
  }
  std::string line;
  std::size_t row = 0;
  // Skip leading comment lines so config-echo headers stay readable.
  do {
    if (!std::getline(in, line)) {
      throw ParseError(path + ": no samples (empty file)");
    }
    ++row;
  } while (!line.empty() && line[0] == '#');

  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 6 || header[0] != "id" || header[1] != "corpus" ||
      header[2] != "split" || header[3] != "gender" || header[4] != "emotion") {
    throw ParseError(path + ": row " + std::to_string(row) +
                     ": expected header id,corpus,split,gender,emotion,f0..");
  }
  const std::size_t dim = header.size() - 5;
  for (std::size_t d = 0; d < dim; ++d) {
    if (header[5 + d] != "f" + std::to_string(d)) {
      throw ParseError(path + ": row " + std::to_string(row) +
                       ": feature column " + std::to_string(d) +
                       " must be named f" + std::to_string(d));
    }
  }

  std::vector<Sample> samples;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 5 + dim) {
      throw ParseError(path + ": row " + std::to_string(row) + ": expected " +
                       std::to_string(5 + dim) + " columns, found " +
                       std::to_string(fields.size()));
    }
    Sample s;
    s.id = fields[0];
    if (s.id.empty()) {
      throw ParseError(path + ": row " + std::to_string(row) + ": empty id");
    }
    try {
      s.corpus = corpus_tag_from_token(fields[1]);
      s.split = split_from_token(fields[2]);
      s.gender = gender_from_token(fields[3]);
    } catch (const ParseError& e) {
      throw ParseError(path + ": row " + std::to_string(row) + ": " +
                       e.what());
    }
    if (!is_known_emotion(fields[4])) {
      throw ParseError(path + ": row " + std::to_string(row) +
                       ": unknown emotion '" + fields[4] + "'");
    }
    s.emotion = fields[4];
    s.features.reserve(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      s.features.push_back(
          parse_double(fields[5 + d], row, "feature f" + std::to_string(d)));
    }
    samples.push_back(std::move(s));
  }
  if (samples.empty()) {
    throw ParseError(path + ": no samples");
  }
  return Corpus(std::move(samples), dim);
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open corpus file for writing: " + path);
  }
  out << "id,corpus,split,gender,emotion";
  for (std::size_t d = 0; d < corpus.feature_dim(); ++d) {
    out << ",f" << d;
  }
  out << "\n";
  char buf[32];
  for (const Sample& s : corpus.samples()) {
    out << s.id << ',' << corpus_tag_name(s.corpus) << ','
        << split_name(s.split) << ',' << gender_name(s.gender) << ','
        << s.emotion;
    for (double f : s.features) {
      const int len = std::snprintf(buf, sizeof buf, "%.17g", f);
      out << ',';
      out.write(buf, len);
    }
    out << "\n";
  }
  if (!out) {
    throw IoError("failed writing corpus file: " + path);
  }
}

std::map<std::pair<Gender, int>, double> reweigh_weights(
    const Corpus& corpus, const std::string& task) {
  if (!is_known_emotion(task)) {
    throw ContractError("reweigh_weights: unknown task '" + task + "'");
  }
  std::int64_t n = 0;
  std::map<Gender, std::int64_t> n_gender;
  std::map<int, std::int64_t> n_label;
  std::map<std::pair<Gender, int>, std::int64_t> n_cell;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Sample& s = corpus.samples()[i];
    if (s.split != Split::kTrain) continue;
    const int y = corpus.binary_label(i, task);
    ++n;
    ++n_gender[s.gender];
    ++n_label[y];
    ++n_cell[{s.gender, y}];
  }
  std::map<std::pair<Gender, int>, double> weights;
  for (Gender g : {Gender::kMale, Gender::kFemale}) {
    for (int y : {0, 1}) {
      const auto it = n_cell.find({g, y});
      if (it == n_cell.end() || it->second == 0) {
        throw ContractError("reweigh_weights: empty (gender=" +
                            gender_name(g) + ", label=" + std::to_string(y) +
                            ") cell in train split");
      }
      weights[{g, y}] =
          static_cast<double>(n_gender[g]) * static_cast<double>(n_label[y]) /
          (static_cast<double>(n) * static_cast<double>(it->second));
    }
  }
  return weights;
}

}  // namespace fairadapt
