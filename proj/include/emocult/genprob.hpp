#pragma once

// Summed token log-probabilities of "<context><feeling>" completions and the
// cross-language Pride/Shame comparison built from them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "emocult/corpus.hpp"
#include "emocult/error.hpp"
#include "emocult/io.hpp"

namespace emocult {

enum class EmotionClass { pride, shame };

constexpr std::string_view to_string(EmotionClass c) noexcept {
  return c == EmotionClass::pride ? "pride" : "shame";
}

inline EmotionClass parse_emotion_class(std::string_view s) {
  if (s == "pride") return EmotionClass::pride;
  if (s == "shame") return EmotionClass::shame;
  throw Error(ErrorCode::InvalidRecord, "unknown emotion class '" + std::string(s) + "'");
}

/// Which emotion words count as pride and which as shame. Word order is the
/// column order of emitted tables: pride words first, then shame words.
class WordClassMap {
 public:
  WordClassMap() = default;
  WordClassMap(std::vector<std::string> pride, std::vector<std::string> shame) {
    for (auto& w : pride) add(std::move(w), EmotionClass::pride);
    for (auto& w : shame) add(std::move(w), EmotionClass::shame);
  }

  static WordClassMap defaults() { return {{"proud", "happy"}, {"ashamed", "embarrassed"}}; }

  std::optional<EmotionClass> class_of(const std::string& word) const {
    auto it = classes_.find(word);
    if (it == classes_.end()) return std::nullopt;
    return it->second;
  }

  const std::vector<std::string>& words() const noexcept { return order_; }

  std::size_t rank(const std::string& word) const {
    auto it = std::find(order_.begin(), order_.end(), word);
    return static_cast<std::size_t>(it - order_.begin());
  }

 private:
  void add(std::string word, EmotionClass c) {
    if (word.empty()) throw Error(ErrorCode::InvalidConfig, "empty emotion word in word-class map");
    if (!classes_.emplace(word, c).second)
      throw Error(ErrorCode::InvalidConfig, "emotion word '" + word + "' listed twice in word-class map");
    order_.push_back(std::move(word));
  }

  std::map<std::string, EmotionClass> classes_;
  std::vector<std::string> order_;
};

/// Reads {"classes": {"pride": [...], "shame": [...]}, ...}; other keys are ignored.
inline WordClassMap load_word_classes(const std::filesystem::path& path) {
  auto in = io::open_input(path);
  try {
    auto j = nlohmann::json::parse(in);
    const auto& c = j.at("classes");
    return WordClassMap(c.at("pride").get<std::vector<std::string>>(), c.at("shame").get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

struct TokenLogProb {
  std::string token;
  double logprob = 0.0;
};

struct LogProbRecord {
  std::string scenario_id;
  LanguageCode language;
  std::string model_id;
  std::string context_text;
  std::string feeling_text;
  std::string emotion_word;  // cross-language key, e.g. "proud" for every language
  EmotionClass emotion_class = EmotionClass::pride;
  std::vector<TokenLogProb> token_logprobs;  // feeling-sentence tokens only
};

inline void validate_record(const LogProbRecord& r, const WordClassMap& classes) {
  const std::string where = "scenario '" + r.scenario_id + "', word '" + r.emotion_word + "', language '" +
                            r.language + "'";
  if (r.scenario_id.empty() || r.language.empty() || r.emotion_word.empty())
    throw Error(ErrorCode::InvalidRecord, where + ": scenario_id, language and emotion_word are required");
  if (r.token_logprobs.empty()) throw Error(ErrorCode::EmptyInput, where + ": no feeling tokens");
  for (const auto& t : r.token_logprobs)
    if (!std::isfinite(t.logprob)) throw Error(ErrorCode::InvalidRecord, where + ": non-finite logprob");
  auto declared = classes.class_of(r.emotion_word);
  if (!declared) throw Error(ErrorCode::InvalidRecord, where + ": word not in the word-class map");
  if (*declared != r.emotion_class)
    throw Error(ErrorCode::InvalidRecord, where + ": class '" + std::string(to_string(r.emotion_class)) +
                                              "' contradicts word-class map ('" +
                                              std::string(to_string(*declared)) + "')");
}

inline nlohmann::json record_to_json(const LogProbRecord& r) {
  nlohmann::json tokens = nlohmann::json::array();
  for (const auto& t : r.token_logprobs) tokens.push_back({{"token", t.token}, {"logprob", t.logprob}});
  return {{"scenario_id", r.scenario_id},   {"language", r.language},
          {"model_id", r.model_id},         {"context_text", r.context_text},
          {"feeling_text", r.feeling_text}, {"emotion_word", r.emotion_word},
          {"emotion_class", to_string(r.emotion_class)}, {"token_logprobs", std::move(tokens)}};
}

inline std::vector<LogProbRecord> parse_logprob_records(std::istream& in, const WordClassMap& classes) {
  std::vector<LogProbRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank(line)) continue;
    auto j = detail::parse_json_line(line, line_no);
    LogProbRecord r;
    try {
      r.scenario_id = j.at("scenario_id").get<std::string>();
      r.language = j.at("language").get<std::string>();
      r.model_id = j.value("model_id", "");
      r.context_text = j.value("context_text", "");
      r.feeling_text = j.value("feeling_text", "");
      r.emotion_word = j.at("emotion_word").get<std::string>();
      r.emotion_class = parse_emotion_class(j.at("emotion_class").get<std::string>());
      for (const auto& t : j.at("token_logprobs")) {
        if (t.at("logprob").is_null())
          throw Error(ErrorCode::InvalidRecord, "null logprob");
        r.token_logprobs.push_back({t.value("token", ""), t.at("logprob").get<double>()});
      }
      validate_record(r, classes);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.message());
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<LogProbRecord> load_logprob_records(const std::filesystem::path& path, const WordClassMap& classes) {
  auto in = io::open_input(path);
  return parse_logprob_records(in, classes);
}

enum class ScoreMode { sum, mean };

constexpr std::string_view to_string(ScoreMode m) noexcept { return m == ScoreMode::sum ? "sum" : "mean"; }

/// Summed log-probability of the feeling sentence (per-token mean in `mean` mode).
inline double feeling_score(const LogProbRecord& record, ScoreMode mode = ScoreMode::sum) {
  if (record.token_logprobs.empty())
    throw Error(ErrorCode::EmptyInput, "record for '" + record.emotion_word + "' has no tokens");
  double s = 0.0;
  for (const auto& t : record.token_logprobs) s += t.logprob;
  if (mode == ScoreMode::mean) s /= static_cast<double>(record.token_logprobs.size());
  return s;
}

struct ScoreCell {
  double score = 0.0;
  std::size_t token_count = 0;
};

/// Languages with the highest score for a word; more than one means a tie.
struct Winner {
  std::vector<LanguageCode> languages;
  bool tie() const noexcept { return languages.size() > 1; }
  bool is_unique(const LanguageCode& lang) const { return languages.size() == 1 && languages.front() == lang; }
};

struct ScenarioComparison {
  std::string scenario_id;
  std::string context_text;
  std::vector<std::string> words;         // word-class map order
  std::vector<LanguageCode> languages;    // sorted
  std::map<std::pair<std::string, LanguageCode>, ScoreCell> table;
  std::map<std::string, Winner> winners;

  const ScoreCell& cell(const std::string& word, const LanguageCode& lang) const {
    auto it = table.find({word, lang});
    if (it == table.end())
      throw Error(ErrorCode::MissingCell, "scenario '" + scenario_id + "' has no cell (" + word + ", " + lang + ")");
    return it->second;
  }
};

inline ScenarioComparison compare_scenario(std::span<const LogProbRecord> records, const std::string& scenario_id,
                                           const WordClassMap& classes = WordClassMap::defaults(),
                                           ScoreMode mode = ScoreMode::sum) {
  ScenarioComparison cmp;
  cmp.scenario_id = scenario_id;
  std::set<std::string> words;
  std::set<LanguageCode> languages;
  for (const auto& r : records) {
    if (r.scenario_id != scenario_id) continue;
    if (cmp.context_text.empty() && r.language == "en") cmp.context_text = r.context_text;
    words.insert(r.emotion_word);
    languages.insert(r.language);
    ScoreCell cell{feeling_score(r, mode), r.token_logprobs.size()};
    if (!cmp.table.emplace(std::make_pair(r.emotion_word, r.language), cell).second)
      throw Error(ErrorCode::DuplicateCell, "scenario '" + scenario_id + "' has two records for (" + r.emotion_word +
                                                ", " + r.language + ")");
  }
  if (cmp.table.empty()) throw Error(ErrorCode::MissingCell, "no records for scenario '" + scenario_id + "'");

  cmp.words.assign(words.begin(), words.end());
  std::stable_sort(cmp.words.begin(), cmp.words.end(),
                   [&](const std::string& a, const std::string& b) { return classes.rank(a) < classes.rank(b); });
  cmp.languages.assign(languages.begin(), languages.end());

  for (const auto& w : cmp.words) {
    Winner winner;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& lang : cmp.languages) {
      auto it = cmp.table.find({w, lang});
      if (it == cmp.table.end())
        throw Error(ErrorCode::MissingCell,
                    "scenario '" + scenario_id + "' is missing (word '" + w + "', language '" + lang + "')");
      const double s = it->second.score;
      if (s > best) {
        best = s;
        winner.languages = {lang};
      } else if (s == best) {
        winner.languages.push_back(lang);
      }
    }
    cmp.winners.emplace(w, std::move(winner));
  }
  return cmp;
}

/// One comparison per scenario, in order of first appearance.
inline std::vector<ScenarioComparison> compare_all(std::span<const LogProbRecord> records,
                                                   const WordClassMap& classes = WordClassMap::defaults(),
                                                   ScoreMode mode = ScoreMode::sum) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  for (const auto& r : records)
    if (seen.insert(r.scenario_id).second) order.push_back(r.scenario_id);
  std::vector<ScenarioComparison> out;
  out.reserve(order.size());
  for (const auto& id : order) out.push_back(compare_scenario(records, id, classes, mode));
  return out;
}

/// Language where each class is expected to be more likely.
struct Expectation {
  LanguageCode pride;
  LanguageCode shame;
};

/// Parses "pride=en,shame=ja".
inline Expectation parse_expectation(std::string_view spec) {
  Expectation e;
  for (const auto& part : io::split(spec, ',')) {
    auto kv = io::split(part, '=');
    if (kv.size() != 2) throw Error(ErrorCode::InvalidConfig, "bad expectation '" + part + "'");
    auto key = std::string(io::trim(kv[0]));
    auto val = std::string(io::trim(kv[1]));
    if (key == "pride") e.pride = val;
    else if (key == "shame") e.shame = val;
    else throw Error(ErrorCode::InvalidConfig, "bad expectation key '" + key + "'");
  }
  if (e.pride.empty() || e.shame.empty())
    throw Error(ErrorCode::InvalidConfig, "expectation needs both pride=LANG and shame=LANG");
  return e;
}

struct ScenarioSupport {
  std::string scenario_id;
  bool pride_supported = false;
  bool shame_supported = false;
};

struct HypothesisReport {
  Expectation expectation;
  std::vector<ScenarioSupport> scenarios;
  std::size_t n_pride_supported = 0;
  std::size_t n_shame_supported = 0;
  bool consistent = false;

  std::string verdict() const { return consistent ? "consistent evidence" : "no consistent evidence"; }
};

/// A class is supported in a scenario when it has at least one word there and
/// every such word wins outright in the expected language.
inline HypothesisReport evaluate_hypotheses(std::span<const ScenarioComparison> comparisons,
                                            const Expectation& expectation,
                                            const WordClassMap& classes = WordClassMap::defaults()) {
  HypothesisReport report;
  report.expectation = expectation;
  for (const auto& cmp : comparisons) {
    for (const auto& lang : {expectation.pride, expectation.shame})
      if (std::find(cmp.languages.begin(), cmp.languages.end(), lang) == cmp.languages.end())
        throw Error(ErrorCode::MissingCell, "scenario '" + cmp.scenario_id + "' has no records in '" + lang + "'");

    auto supported = [&](EmotionClass c, const LanguageCode& lang) {
      bool any = false;
      for (const auto& w : cmp.words) {
        if (classes.class_of(w) != c) continue;
        any = true;
        if (!cmp.winners.at(w).is_unique(lang)) return false;
      }
      return any;
    };
    ScenarioSupport s{cmp.scenario_id, supported(EmotionClass::pride, expectation.pride),
                      supported(EmotionClass::shame, expectation.shame)};
    report.n_pride_supported += s.pride_supported;
    report.n_shame_supported += s.shame_supported;
    report.scenarios.push_back(std::move(s));
  }
  report.consistent = !report.scenarios.empty() && report.n_pride_supported == report.scenarios.size() &&
                      report.n_shame_supported == report.scenarios.size();
  return report;
}

// --------------------------------------------------------------------------
// Emitters
// --------------------------------------------------------------------------

inline std::string winner_mark(const ScenarioComparison& cmp, const std::string& word, const LanguageCode& lang) {
  const auto& w = cmp.winners.at(word);
  if (std::find(w.languages.begin(), w.languages.end(), lang) == w.languages.end()) return "0";
  return w.tie() ? "tie" : "1";
}

/// Long-format CSV: one row per (scenario, word, language) cell.
inline std::string comparisons_to_csv(std::span<const ScenarioComparison> comparisons, const WordClassMap& classes,
                                      const nlohmann::json& settings) {
  std::string out = "# settings: " + settings.dump() + "\n";
  out += "scenario_id,emotion_word,emotion_class,language,score,token_count,winner\n";
  for (const auto& cmp : comparisons)
    for (const auto& w : cmp.words)
      for (const auto& lang : cmp.languages) {
        const auto& c = cmp.cell(w, lang);
        auto cls = classes.class_of(w);
        out += io::csv_line({cmp.scenario_id, w, cls ? std::string(to_string(*cls)) : std::string(), lang,
                             io::format_number(c.score), std::to_string(c.token_count), winner_mark(cmp, w, lang)});
      }
  return out;
}

/// Human-readable table, one block per scenario; '*' marks the winning language
/// of each word, '=' a tie.
inline std::string comparisons_to_text(std::span<const ScenarioComparison> comparisons) {
  std::string out;
  for (const auto& cmp : comparisons) {
    out += cmp.scenario_id;
    if (!cmp.context_text.empty()) out += "  \"" + cmp.context_text + "\"";
    out += "\n  language";
    for (const auto& w : cmp.words) {
      std::string col = w;
      col.resize(std::max<std::size_t>(col.size(), 13), ' ');
      out += "  " + col;
    }
    out += "\n";
    for (const auto& lang : cmp.languages) {
      std::string label = lang;
      label.resize(8, ' ');
      out += "  " + label;
      for (const auto& w : cmp.words) {
        auto mark = winner_mark(cmp, w, lang);
        std::string cell = io::format_fixed(cmp.cell(w, lang).score, 3) + (mark == "1" ? "*" : mark == "tie" ? "=" : "");
        cell.resize(std::max<std::size_t>(cell.size(), std::max<std::size_t>(w.size(), 13)), ' ');
        out += "  " + cell;
      }
      out += "\n";
    }
  }
  return out;
}

inline nlohmann::json hypothesis_to_json(const HypothesisReport& report, const nlohmann::json& settings) {
  nlohmann::json scenarios = nlohmann::json::array();
  for (const auto& s : report.scenarios)
    scenarios.push_back(
        {{"scenario_id", s.scenario_id}, {"pride_supported", s.pride_supported}, {"shame_supported", s.shame_supported}});
  return {{"settings", settings},
          {"expectation", {{"pride", report.expectation.pride}, {"shame", report.expectation.shame}}},
          {"scenarios", std::move(scenarios)},
          {"n_scenarios", report.scenarios.size()},
          {"n_pride_supported", report.n_pride_supported},
          {"n_shame_supported", report.n_shame_supported},
          {"verdict", report.verdict()}};
}

}  // namespace emocult
