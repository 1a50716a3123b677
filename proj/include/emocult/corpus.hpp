#pragma once

// Emotion lexica, embedding sets, and the pairing of two embedding sets over
// their shared lemmas. Everything downstream indexes lemmas in lexicon order.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <regex>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "emocult/error.hpp"
#include "emocult/io.hpp"

namespace emocult {

using Vector = std::vector<double>;
using LemmaId = std::string;
using LanguageCode = std::string;

struct PhrasePair {
  std::string feel;  // "I feel <emotion>"
  std::string am;    // "I am <emotion>"
};

struct LexiconEntry {
  LemmaId lemma;
  std::map<LanguageCode, PhrasePair> phrases;
};

/// Ordered, validated set of emotion lemmas with per-language phrase pairs.
/// Translated phrases may repeat across lemmas; lemma ids may not.
class EmotionLexicon {
 public:
  EmotionLexicon() = default;

  static EmotionLexicon from_entries(std::vector<LexiconEntry> entries) {
    EmotionLexicon lex;
    for (const auto& e : entries)
      for (const auto& [lang, _] : e.phrases) lex.languages_.insert(lang);

    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      if (e.lemma.empty())
        throw Error(ErrorCode::ParseError, "entry " + std::to_string(i + 1) + " has an empty lemma");
      if (!lex.index_.emplace(e.lemma, i).second)
        throw Error(ErrorCode::DuplicateLemma, "lemma '" + e.lemma + "' appears more than once");
      for (const auto& lang : lex.languages_) {
        auto it = e.phrases.find(lang);
        if (it == e.phrases.end())
          throw Error(ErrorCode::MissingPhrase,
                      "lemma '" + e.lemma + "' has no phrases for language '" + lang + "'");
        if (it->second.feel.empty() || it->second.am.empty())
          throw Error(ErrorCode::MissingPhrase,
                      "lemma '" + e.lemma + "' has an empty phrase for language '" + lang + "'");
      }
    }
    if (lex.languages_.count(""))
      throw Error(ErrorCode::ParseError, "empty language code");
    lex.entries_ = std::move(entries);
    return lex;
  }

  const std::vector<LexiconEntry>& entries() const noexcept { return entries_; }
  const std::set<LanguageCode>& languages() const noexcept { return languages_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool contains(const LemmaId& lemma) const { return index_.count(lemma) > 0; }

  /// Canonical position of a lemma; throws UnknownLemma.
  std::size_t position(const LemmaId& lemma) const {
    auto it = index_.find(lemma);
    if (it == index_.end()) throw Error(ErrorCode::UnknownLemma, "lemma '" + lemma + "' not in lexicon");
    return it->second;
  }

  std::vector<LemmaId> lemmas() const {
    std::vector<LemmaId> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.lemma);
    return out;
  }

  /// Number of distinct phrase pairs for a language (translation collisions collapse).
  std::size_t unique_forms(const LanguageCode& lang) const {
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : entries_) {
      auto it = e.phrases.find(lang);
      if (it != e.phrases.end()) seen.emplace(it->second.feel, it->second.am);
    }
    return seen.size();
  }

 private:
  std::vector<LexiconEntry> entries_;
  std::set<LanguageCode> languages_;
  std::unordered_map<LemmaId, std::size_t> index_;
};

namespace detail {

inline nlohmann::json parse_json_line(const std::string& line, std::size_t line_no) {
  try {
    return nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
  }
}

inline bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

inline std::string require_string(const nlohmann::json& obj, const char* key, std::size_t line_no) {
  if (!obj.is_object() || !obj.contains(key) || !obj.at(key).is_string())
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line_no) + ": missing string field '" + key + "'");
  return obj.at(key).get<std::string>();
}

}  // namespace detail

inline EmotionLexicon parse_lexicon(std::istream& in) {
  std::vector<LexiconEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank(line)) continue;
    auto obj = detail::parse_json_line(line, line_no);
    LexiconEntry entry;
    entry.lemma = detail::require_string(obj, "lemma", line_no);
    if (!obj.contains("phrases") || !obj["phrases"].is_object())
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": missing 'phrases' object");
    for (const auto& [lang, pair] : obj["phrases"].items()) {
      if (!pair.is_object() || !pair.contains("feel") || !pair.contains("am"))
        throw Error(ErrorCode::MissingPhrase, "line " + std::to_string(line_no) + ": lemma '" +
                                                  entry.lemma + "' language '" + lang +
                                                  "' needs both 'feel' and 'am'");
      entry.phrases[lang] = PhrasePair{detail::require_string(pair, "feel", line_no),
                                       detail::require_string(pair, "am", line_no)};
    }
    entries.push_back(std::move(entry));
  }
  if (entries.empty()) throw Error(ErrorCode::EmptyInput, "lexicon has no entries");
  return EmotionLexicon::from_entries(std::move(entries));
}

inline EmotionLexicon load_lexicon(const std::filesystem::path& path) {
  auto in = io::open_input(path);
  return parse_lexicon(in);
}

/// One model's vectors for one language, keyed by lemma, in file order.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;

  EmbeddingSet(std::string model_id, LanguageCode language, std::size_t dim,
               nlohmann::json provenance = nlohmann::json::object())
      : model_id_(std::move(model_id)),
        language_(std::move(language)),
        dim_(dim),
        provenance_(std::move(provenance)) {
    if (dim_ == 0) throw Error(ErrorCode::DimensionMismatch, "embedding dim must be positive");
  }

  void add(LemmaId lemma, Vector vec) {
    if (vec.size() != dim_)
      throw Error(ErrorCode::DimensionMismatch, "lemma '" + lemma + "' has length " +
                                                    std::to_string(vec.size()) + ", expected " +
                                                    std::to_string(dim_));
    if (!std::all_of(vec.begin(), vec.end(), [](double x) { return std::isfinite(x); }))
      throw Error(ErrorCode::NonFiniteVector, "lemma '" + lemma + "' has a non-finite component");
    if (!index_.emplace(lemma, lemmas_.size()).second)
      throw Error(ErrorCode::DuplicateLemma, "lemma '" + lemma + "' appears more than once");
    lemmas_.push_back(std::move(lemma));
    vectors_.push_back(std::move(vec));
  }

  const std::string& model_id() const noexcept { return model_id_; }
  const LanguageCode& language() const noexcept { return language_; }
  std::size_t dim() const noexcept { return dim_; }
  const nlohmann::json& provenance() const noexcept { return provenance_; }
  const std::vector<LemmaId>& lemmas() const noexcept { return lemmas_; }
  std::size_t size() const noexcept { return lemmas_.size(); }
  bool contains(const LemmaId& lemma) const { return index_.count(lemma) > 0; }

  std::span<const double> at(const LemmaId& lemma) const {
    auto it = index_.find(lemma);
    if (it == index_.end())
      throw Error(ErrorCode::MissingLemma,
                  "lemma '" + lemma + "' not in embeddings of " + model_id_ + "/" + language_);
    return vectors_[it->second];
  }

  std::span<const double> vector(std::size_t i) const { return vectors_.at(i); }

 private:
  std::string model_id_;
  LanguageCode language_;
  std::size_t dim_ = 0;
  nlohmann::json provenance_ = nlohmann::json::object();
  std::vector<LemmaId> lemmas_;
  std::vector<Vector> vectors_;
  std::unordered_map<LemmaId, std::size_t> index_;
};

namespace detail {

// nlohmann rejects bare NaN/Infinity tokens (as written by e.g. Python's json);
// recognise them so the failure is reported as a non-finite vector.
inline bool has_nonfinite_token(const std::string& line) {
  static const std::regex pattern(R"([\[,]\s*-?(NaN|nan|Infinity|inf|Inf)\s*[,\]])");
  return std::regex_search(line, pattern);
}

}  // namespace detail

/// Parses an embedding file. With a lexicon, every lemma must belong to it.
inline EmbeddingSet parse_embeddings(std::istream& in, const EmotionLexicon* lexicon) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<EmbeddingSet> set;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank(line)) continue;
    if (!set) {
      auto header = detail::parse_json_line(line, line_no);
      if (!header.contains("dim") || !header["dim"].is_number_integer() || header["dim"].get<long long>() <= 0)
        throw Error(ErrorCode::ParseError, "header needs a positive integer 'dim'");
      nlohmann::json provenance = header.value("provenance", nlohmann::json::object());
      set.emplace(detail::require_string(header, "model_id", line_no),
                  detail::require_string(header, "language", line_no),
                  header["dim"].get<std::size_t>(), std::move(provenance));
      if (set->language().empty()) throw Error(ErrorCode::ParseError, "empty language code");
      continue;
    }
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      if (detail::has_nonfinite_token(line))
        throw Error(ErrorCode::NonFiniteVector, "line " + std::to_string(line_no) + ": non-finite component");
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
    }
    auto lemma = detail::require_string(row, "lemma", line_no);
    if (!row.contains("vector") || !row["vector"].is_array())
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": missing 'vector' array");
    if (lexicon && !lexicon->contains(lemma))
      throw Error(ErrorCode::UnknownLemma,
                  "line " + std::to_string(line_no) + ": lemma '" + lemma + "' not in lexicon");
    Vector vec;
    vec.reserve(row["vector"].size());
    for (const auto& x : row["vector"]) {
      if (x.is_null())
        throw Error(ErrorCode::NonFiniteVector, "line " + std::to_string(line_no) + ": null component");
      if (!x.is_number())
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": non-numeric component");
      vec.push_back(x.get<double>());
    }
    try {
      set->add(std::move(lemma), std::move(vec));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.message());
    }
  }
  if (!set) throw Error(ErrorCode::EmptyInput, "embedding file has no header");
  return std::move(*set);
}

inline EmbeddingSet load_embeddings(const std::filesystem::path& path, const EmotionLexicon& lexicon) {
  auto in = io::open_input(path);
  return parse_embeddings(in, &lexicon);
}

/// Writes the JSON Lines embedding format; doubles round-trip exactly.
inline void write_embeddings(std::ostream& out, const EmbeddingSet& set) {
  nlohmann::json header = {{"model_id", set.model_id()},
                           {"language", set.language()},
                           {"dim", set.dim()},
                           {"provenance", set.provenance()}};
  out << header.dump() << '\n';
  for (std::size_t i = 0; i < set.size(); ++i) {
    auto v = set.vector(i);
    nlohmann::json row = {{"lemma", set.lemmas()[i]}, {"vector", Vector(v.begin(), v.end())}};
    out << row.dump() << '\n';
  }
}

inline Vector mean_contextual_embedding(std::span<const double> feel_vec, std::span<const double> am_vec) {
  if (feel_vec.size() != am_vec.size())
    throw Error(ErrorCode::LengthMismatch, "phrase embeddings differ in length");
  Vector out(feel_vec.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (feel_vec[i] + am_vec[i]) / 2.0;
  return out;
}

/// Two embedding sets restricted to their shared lemmas in lexicon order.
/// Holds references; the sets must outlive the pairing.
class PairedSet {
 public:
  PairedSet(std::vector<LemmaId> lemmas, const EmbeddingSet& left, const EmbeddingSet& right)
      : lemmas_(std::move(lemmas)), left_(left), right_(right) {}

  const std::vector<LemmaId>& lemmas() const noexcept { return lemmas_; }
  const EmbeddingSet& left() const noexcept { return left_.get(); }
  const EmbeddingSet& right() const noexcept { return right_.get(); }

 private:
  std::vector<LemmaId> lemmas_;
  std::reference_wrapper<const EmbeddingSet> left_;
  std::reference_wrapper<const EmbeddingSet> right_;
};

inline constexpr std::size_t kMinPairedLemmas = 3;

inline PairedSet pair_sets(const EmbeddingSet& a, const EmbeddingSet& b, const EmotionLexicon& lexicon) {
  std::vector<LemmaId> shared;
  for (const auto& entry : lexicon.entries())
    if (a.contains(entry.lemma) && b.contains(entry.lemma)) shared.push_back(entry.lemma);
  if (shared.size() < kMinPairedLemmas)
    throw Error(ErrorCode::IntersectionTooSmall,
                std::to_string(shared.size()) + " shared lemmas, need at least " +
                    std::to_string(kMinPairedLemmas));
  return PairedSet(std::move(shared), a, b);
}

}  // namespace emocult
