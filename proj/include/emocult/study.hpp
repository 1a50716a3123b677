#pragma once

// Human cultural-awareness ratings of model completions: per-group means and
// pairwise annotator agreement.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "emocult/error.hpp"
#include "emocult/io.hpp"
#include "emocult/metrics.hpp"

namespace emocult {

/// How cultural context reaches the model: an English "You live in X." sentence,
/// or a prompt written in the native language.
enum class ContextMode { english, native };

constexpr std::string_view to_string(ContextMode m) noexcept { return m == ContextMode::english ? "english" : "native"; }

inline ContextMode parse_context_mode(std::string_view s) {
  if (s == "english") return ContextMode::english;
  if (s == "native") return ContextMode::native;
  throw Error(ErrorCode::InvalidRecord, "unknown context mode '" + std::string(s) + "'");
}

inline constexpr int kMinScore = 1;
inline constexpr int kMaxScore = 7;

struct AnnotationRecord {
  std::string question_id;
  std::string language;
  std::string model_id;
  ContextMode context_mode = ContextMode::english;
  std::string annotator_id;
  int score = kMinScore;
  std::string completion_text;
};

inline const std::vector<std::string>& annotation_columns() {
  static const std::vector<std::string> cols = {"question_id", "language",     "model_id",       "context_mode",
                                                "annotator_id", "score",       "completion_text"};
  return cols;
}

namespace detail {

inline int parse_score(std::string_view raw) {
  auto s = io::trim(raw);
  if (s.empty()) throw Error(ErrorCode::InvalidScore, "empty score");
  if (!std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw Error(ErrorCode::InvalidScore, "score '" + std::string(s) + "' is not an integer");
  if (s.size() > 2) throw Error(ErrorCode::InvalidScore, "score '" + std::string(s) + "' outside [1,7]");
  int v = std::stoi(std::string(s));
  if (v < kMinScore || v > kMaxScore)
    throw Error(ErrorCode::InvalidScore, "score '" + std::string(s) + "' outside [1,7]");
  return v;
}

}  // namespace detail

/// Parses the annotation CSV. Every bad row is reported, one per line, in a
/// single error.
inline std::vector<AnnotationRecord> parse_annotations(std::istream& in) {
  auto rows = io::read_csv(in);
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "annotation file is empty");
  const auto& header = rows.front().fields;
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[std::string(io::trim(header[i]))] = i;
  for (const auto& name : annotation_columns())
    if (name != "completion_text" && !col.count(name))
      throw Error(ErrorCode::ParseError, "annotation header lacks column '" + name + "'");

  std::vector<AnnotationRecord> out;
  std::string problems;
  ErrorCode first_code = ErrorCode::InvalidRecord;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    auto field = [&](const std::string& name) -> std::string {
      auto it = col.find(name);
      if (it == col.end() || it->second >= row.fields.size()) return {};
      return row.fields[it->second];
    };
    try {
      if (row.fields.size() != header.size())
        throw Error(ErrorCode::ParseError, "expected " + std::to_string(header.size()) + " fields, got " +
                                               std::to_string(row.fields.size()));
      AnnotationRecord r;
      r.question_id = field("question_id");
      r.language = field("language");
      r.model_id = field("model_id");
      r.annotator_id = field("annotator_id");
      r.completion_text = field("completion_text");
      if (r.question_id.empty() || r.language.empty() || r.model_id.empty() || r.annotator_id.empty())
        throw Error(ErrorCode::InvalidRecord, "question_id, language, model_id and annotator_id are required");
      r.context_mode = parse_context_mode(field("context_mode"));
      r.score = detail::parse_score(field("score"));
      out.push_back(std::move(r));
    } catch (const Error& e) {
      if (problems.empty()) first_code = e.code();
      problems += "\n  row " + std::to_string(i) + " (line " + std::to_string(row.line) + "): " + e.message();
    }
  }
  if (!problems.empty()) throw Error(first_code, "invalid annotation rows:" + problems);
  return out;
}

inline std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path) {
  auto in = io::open_input(path);
  return parse_annotations(in);
}

inline std::string annotations_to_csv(std::span<const AnnotationRecord> records) {
  std::string out = io::csv_line(annotation_columns());
  for (const auto& r : records)
    out += io::csv_line({r.question_id, r.language, r.model_id, std::string(to_string(r.context_mode)), r.annotator_id,
                         std::to_string(r.score), r.completion_text});
  return out;
}

// --------------------------------------------------------------------------
// Mean awareness, grouped by (model, context mode, language)
// --------------------------------------------------------------------------

struct AwarenessKey {
  std::string model_id;
  ContextMode context_mode;
  std::string language;
  auto operator<=>(const AwarenessKey&) const = default;
};

struct AwarenessCell {
  double mean = 0.0;
  std::size_t count = 0;
  int min = kMaxScore;
  int max = kMinScore;
};

using AwarenessTable = std::map<AwarenessKey, AwarenessCell>;

inline AwarenessTable mean_awareness(std::span<const AnnotationRecord> records) {
  std::map<AwarenessKey, long long> sums;
  AwarenessTable table;
  for (const auto& r : records) {
    AwarenessKey key{r.model_id, r.context_mode, r.language};
    auto& cell = table[key];
    ++cell.count;
    cell.min = std::min(cell.min, r.score);
    cell.max = std::max(cell.max, r.score);
    sums[key] += r.score;
  }
  // Integer sums make the mean exact up to one rounding, independent of record order.
  for (auto& [key, cell] : table) cell.mean = static_cast<double>(sums[key]) / static_cast<double>(cell.count);
  return table;
}

// --------------------------------------------------------------------------
// Agreement, grouped by (language, model, context mode)
// --------------------------------------------------------------------------

struct AgreementKey {
  std::string language;
  std::string model_id;
  ContextMode context_mode;
  auto operator<=>(const AgreementKey&) const = default;
};

struct AgreementCell {
  std::optional<double> r;  // undefined when either annotator gave a constant list
  std::size_t n_questions = 0;
  std::string annotator_a, annotator_b;
};

using AgreementTable = std::map<AgreementKey, AgreementCell>;

/// Pearson r between the two annotators of each group over question-aligned scores.
/// With `allow_single_annotator`, a group rated by one annotator yields an
/// undefined r instead of an error.
inline AgreementTable annotator_agreement(std::span<const AnnotationRecord> records,
                                          bool allow_single_annotator = false) {
  // group -> annotator -> question -> score
  std::map<AgreementKey, std::map<std::string, std::map<std::string, int>>> groups;
  for (const auto& r : records) {
    AgreementKey key{r.language, r.model_id, r.context_mode};
    auto& by_question = groups[key][r.annotator_id];
    if (!by_question.emplace(r.question_id, r.score).second)
      throw Error(ErrorCode::InvalidRecord, "annotator '" + r.annotator_id + "' scored question '" + r.question_id +
                                                "' twice in group (" + r.language + ", " + r.model_id + ", " +
                                                std::string(to_string(r.context_mode)) + ")");
  }

  AgreementTable table;
  for (const auto& [key, annotators] : groups) {
    const std::string group = "(" + key.language + ", " + key.model_id + ", " +
                              std::string(to_string(key.context_mode)) + ")";
    if (annotators.size() == 1 && allow_single_annotator) {
      const auto& [name, scores] = *annotators.begin();
      table.emplace(key, AgreementCell{std::nullopt, scores.size(), name, {}});
      continue;
    }
    if (annotators.size() != 2)
      throw Error(ErrorCode::AnnotatorCount,
                  "group " + group + " has " + std::to_string(annotators.size()) + " annotators, expected 2");
    auto it = annotators.begin();
    const auto& [name_a, scores_a] = *it++;
    const auto& [name_b, scores_b] = *it;

    std::vector<double> xs, ys;
    for (const auto& [q, s] : scores_a) {
      auto other = scores_b.find(q);
      if (other == scores_b.end())
        throw Error(ErrorCode::UnpairedQuestion, "question '" + q + "' in group " + group + " scored by '" + name_a +
                                                     "' but not by '" + name_b + "'");
      xs.push_back(s);
      ys.push_back(other->second);
    }
    for (const auto& [q, _] : scores_b)
      if (!scores_a.count(q))
        throw Error(ErrorCode::UnpairedQuestion, "question '" + q + "' in group " + group + " scored by '" + name_b +
                                                     "' but not by '" + name_a + "'");

    AgreementCell cell;
    cell.n_questions = xs.size();
    cell.annotator_a = name_a;
    cell.annotator_b = name_b;
    if (xs.size() >= 2) cell.r = pearson(xs, ys);
    table.emplace(key, std::move(cell));
  }
  return table;
}

inline std::string awareness_to_csv(const AwarenessTable& table, const nlohmann::json& settings = nullptr) {
  std::string out = settings.is_null() ? std::string() : "# settings: " + settings.dump() + "\n";
  out += "model_id,context_mode,language,mean,count\n";
  for (const auto& [k, c] : table)
    out += io::csv_line({k.model_id, std::string(to_string(k.context_mode)), k.language, io::format_number(c.mean),
                         std::to_string(c.count)});
  return out;
}

inline std::string agreement_to_csv(const AgreementTable& table, const nlohmann::json& settings = nullptr) {
  std::string out = settings.is_null() ? std::string() : "# settings: " + settings.dump() + "\n";
  out += "language,model_id,context_mode,r,n_questions\n";
  for (const auto& [k, c] : table)
    out += io::csv_line({k.language, k.model_id, std::string(to_string(k.context_mode)),
                         c.r ? io::format_number(*c.r) : std::string(), std::to_string(c.n_questions)});
  return out;
}

inline nlohmann::json study_to_json(const AwarenessTable& awareness, const AgreementTable& agreement,
                                    const nlohmann::json& settings = nullptr) {
  nlohmann::json means = nlohmann::json::array();
  for (const auto& [k, c] : awareness)
    means.push_back({{"model_id", k.model_id}, {"context_mode", to_string(k.context_mode)}, {"language", k.language},
                     {"mean", c.mean}, {"count", c.count}});
  nlohmann::json agree = nlohmann::json::array();
  for (const auto& [k, c] : agreement)
    agree.push_back({{"language", k.language}, {"model_id", k.model_id}, {"context_mode", to_string(k.context_mode)},
                     {"r", c.r ? nlohmann::json(*c.r) : nlohmann::json(nullptr)}, {"n_questions", c.n_questions},
                     {"annotators", {c.annotator_a, c.annotator_b}}});
  nlohmann::json out = {{"awareness", std::move(means)}, {"agreement", std::move(agree)}};
  if (!settings.is_null()) out["settings"] = settings;
  return out;
}

}  // namespace emocult
