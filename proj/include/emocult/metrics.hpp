#pragma once

// Distance-based similarity between two embedding spaces.
//
// For an emotion e and the ordered list of the other shared emotions, each
// space yields a vector of distances from e to every other emotion. The
// similarity of e across the two spaces is the correlation of those two
// distance vectors. No alignment between the spaces is needed: each distance
// is measured within its own space, so the spaces may even differ in dimension.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "emocult/corpus.hpp"
#include "emocult/error.hpp"
#include "emocult/io.hpp"
#include "emocult/stats.hpp"

namespace emocult {

enum class DistanceKind { euclidean, cosine };
enum class CorrelationKind { pearson, spearman };

constexpr std::string_view to_string(DistanceKind k) noexcept {
  return k == DistanceKind::euclidean ? "euclidean" : "cosine";
}
constexpr std::string_view to_string(CorrelationKind k) noexcept {
  return k == CorrelationKind::pearson ? "pearson" : "spearman";
}

inline DistanceKind parse_distance_kind(std::string_view s) {
  if (s == "euclidean") return DistanceKind::euclidean;
  if (s == "cosine") return DistanceKind::cosine;
  throw Error(ErrorCode::InvalidConfig, "unknown distance '" + std::string(s) + "'");
}
inline CorrelationKind parse_correlation_kind(std::string_view s) {
  if (s == "pearson") return CorrelationKind::pearson;
  if (s == "spearman") return CorrelationKind::spearman;
  throw Error(ErrorCode::InvalidConfig, "unknown correlation '" + std::string(s) + "'");
}

// --------------------------------------------------------------------------
// Distances
// --------------------------------------------------------------------------

namespace detail {
inline void require_same_length(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw Error(ErrorCode::LengthMismatch,
                "vectors of length " + std::to_string(u.size()) + " and " + std::to_string(v.size()));
  if (u.empty()) throw Error(ErrorCode::LengthMismatch, "empty vectors");
}
}  // namespace detail

inline double euclidean(std::span<const double> u, std::span<const double> v) {
  detail::require_same_length(u, v);
  double ss = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    ss += d * d;
  }
  return std::sqrt(ss);
}

/// 1 - cos(u, v), in [0, 2].
inline double cosine_distance(std::span<const double> u, std::span<const double> v) {
  detail::require_same_length(u, v);
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw Error(ErrorCode::ZeroNorm, "cosine distance of a zero vector");
  const double cos = std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
  return 1.0 - cos;
}

inline double distance(DistanceKind kind, std::span<const double> u, std::span<const double> v) {
  return kind == DistanceKind::euclidean ? euclidean(u, v) : cosine_distance(u, v);
}

// --------------------------------------------------------------------------
// Correlations. std::nullopt marks an undefined correlation (constant input).
// --------------------------------------------------------------------------

inline std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw Error(ErrorCode::LengthMismatch,
                "correlation of lists of length " + std::to_string(x.size()) + " and " +
                    std::to_string(y.size()));
  if (x.size() < 2) throw Error(ErrorCode::LengthMismatch, "correlation needs at least 2 values");
  const double mx = stats::mean(x);
  const double my = stats::mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// 1-based fractional ranks; tied values share the average of their ranks.
inline std::vector<double> fractional_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

inline std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw Error(ErrorCode::LengthMismatch, "correlation of lists of different length");
  auto rx = fractional_ranks(x);
  auto ry = fractional_ranks(y);
  return pearson(rx, ry);
}

inline std::optional<double> correlate(CorrelationKind kind, std::span<const double> x,
                                       std::span<const double> y) {
  return kind == CorrelationKind::pearson ? pearson(x, y) : spearman(x, y);
}

// --------------------------------------------------------------------------
// Distance-based similarity
// --------------------------------------------------------------------------

/// Distances from `lemma` to each of `others`, in the order given.
inline std::vector<double> distance_vector(const EmbeddingSet& set, const LemmaId& lemma,
                                           std::span<const LemmaId> others, DistanceKind kind) {
  auto origin = set.at(lemma);
  std::vector<double> out;
  out.reserve(others.size());
  for (const auto& other : others) {
    if (other == lemma)
      throw Error(ErrorCode::InvalidConfig, "lemma '" + lemma + "' listed among its own comparisons");
    out.push_back(distance(kind, origin, set.at(other)));
  }
  return out;
}

inline std::optional<double> emotion_similarity(const PairedSet& pair, const LemmaId& lemma,
                                                DistanceKind kind, CorrelationKind corr) {
  const auto& lemmas = pair.lemmas();
  if (lemmas.size() < kMinPairedLemmas)
    throw Error(ErrorCode::IntersectionTooSmall, "pairing has fewer than 3 lemmas");
  if (std::find(lemmas.begin(), lemmas.end(), lemma) == lemmas.end())
    throw Error(ErrorCode::MissingLemma, "lemma '" + lemma + "' is not in the pairing");
  std::vector<LemmaId> others;
  others.reserve(lemmas.size() - 1);
  for (const auto& l : lemmas)
    if (l != lemma) others.push_back(l);
  auto left = distance_vector(pair.left(), lemma, others, kind);
  auto right = distance_vector(pair.right(), lemma, others, kind);
  return correlate(corr, left, right);
}

struct SimilaritySettings {
  DistanceKind distance = DistanceKind::euclidean;
  CorrelationKind correlation = CorrelationKind::pearson;
  stats::TTestVariant ttest_variant = stats::TTestVariant::welch;
  std::string left_model, left_language;
  std::string right_model, right_language;
};

struct LemmaCorrelation {
  LemmaId lemma;
  std::optional<double> r;  // nullopt: undefined (a constant distance vector)
};

struct SimilarityReport {
  SimilaritySettings settings;
  std::vector<LemmaCorrelation> per_lemma;
  double mean_r = 0.0;
  double std_r = 0.0;  // population standard deviation over valid entries
  std::size_t n_valid = 0;

  std::vector<double> valid_values() const {
    std::vector<double> out;
    out.reserve(per_lemma.size());
    for (const auto& e : per_lemma)
      if (e.r) out.push_back(*e.r);
    return out;
  }
};

namespace detail {

/// Row-major pairwise distance matrix over `lemmas`.
inline std::vector<double> distance_matrix(const EmbeddingSet& set, std::span<const LemmaId> lemmas,
                                           DistanceKind kind) {
  const std::size_t n = lemmas.size();
  std::vector<std::span<const double>> vecs;
  vecs.reserve(n);
  for (const auto& l : lemmas) vecs.push_back(set.at(l));
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m[i * n + j] = m[j * n + i] = distance(kind, vecs[i], vecs[j]);
  return m;
}

inline void summarize(SimilarityReport& report) {
  auto values = report.valid_values();
  report.n_valid = values.size();
  if (values.empty()) throw Error(ErrorCode::NoValidCorrelations, "every per-lemma correlation is undefined");
  report.mean_r = stats::mean(values);
  report.std_r = stats::population_stddev(values);
}

}  // namespace detail

/// Per-lemma similarity for every paired lemma, plus mean and population std
/// over the defined ones. Iterates in canonical order, so output is deterministic.
inline SimilarityReport aggregate_similarity(const PairedSet& pair, DistanceKind kind, CorrelationKind corr) {
  const auto& lemmas = pair.lemmas();
  const std::size_t n = lemmas.size();
  if (n < kMinPairedLemmas) throw Error(ErrorCode::IntersectionTooSmall, "pairing has fewer than 3 lemmas");

  // Each distance is computed once per space rather than once per lemma pair visit.
  auto left = detail::distance_matrix(pair.left(), lemmas, kind);
  auto right = detail::distance_matrix(pair.right(), lemmas, kind);

  SimilarityReport report;
  report.settings.distance = kind;
  report.settings.correlation = corr;
  report.settings.left_model = pair.left().model_id();
  report.settings.left_language = pair.left().language();
  report.settings.right_model = pair.right().model_id();
  report.settings.right_language = pair.right().language();
  report.per_lemma.reserve(n);

  std::vector<double> dl, dr;
  dl.reserve(n - 1);
  dr.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    dl.clear();
    dr.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      dl.push_back(left[i * n + j]);
      dr.push_back(right[i * n + j]);
    }
    report.per_lemma.push_back({lemmas[i], correlate(corr, dl, dr)});
  }
  detail::summarize(report);
  return report;
}

// --------------------------------------------------------------------------
// Serialization
// --------------------------------------------------------------------------

inline nlohmann::json settings_to_json(const SimilaritySettings& s) {
  return {{"distance", to_string(s.distance)},
          {"correlation", to_string(s.correlation)},
          {"ttest_variant", stats::to_string(s.ttest_variant)},
          {"std", "population"},
          {"left", {{"model_id", s.left_model}, {"language", s.left_language}}},
          {"right", {{"model_id", s.right_model}, {"language", s.right_language}}}};
}

inline nlohmann::json report_to_json(const SimilarityReport& report) {
  nlohmann::json per_lemma = nlohmann::json::array();
  for (const auto& e : report.per_lemma)
    per_lemma.push_back({{"lemma", e.lemma}, {"r", e.r ? nlohmann::json(*e.r) : nlohmann::json(nullptr)}});
  return {{"settings", settings_to_json(report.settings)},
          {"per_lemma", std::move(per_lemma)},
          {"mean_r", report.mean_r},
          {"std_r", report.std_r},
          {"n_valid", report.n_valid},
          {"n_lemmas", report.per_lemma.size()}};
}

inline SimilarityReport report_from_json(const nlohmann::json& j) {
  try {
    SimilarityReport report;
    const auto& s = j.at("settings");
    report.settings.distance = parse_distance_kind(s.at("distance").get<std::string>());
    report.settings.correlation = parse_correlation_kind(s.at("correlation").get<std::string>());
    if (s.contains("ttest_variant"))
      report.settings.ttest_variant = stats::parse_ttest_variant(s["ttest_variant"].get<std::string>());
    report.settings.left_model = s.at("left").at("model_id").get<std::string>();
    report.settings.left_language = s.at("left").at("language").get<std::string>();
    report.settings.right_model = s.at("right").at("model_id").get<std::string>();
    report.settings.right_language = s.at("right").at("language").get<std::string>();
    for (const auto& e : j.at("per_lemma")) {
      LemmaCorrelation lc{e.at("lemma").get<std::string>(), std::nullopt};
      if (!e.at("r").is_null()) lc.r = e["r"].get<double>();
      report.per_lemma.push_back(std::move(lc));
    }
    detail::summarize(report);
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("similarity report: ") + e.what());
  }
}

inline SimilarityReport load_report(const std::filesystem::path& path) {
  auto in = io::open_input(path);
  try {
    return report_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

/// CSV with columns lemma,r (empty r when undefined), preceded by a
/// '#'-prefixed settings line.
inline std::string report_to_csv(const SimilarityReport& report) {
  std::string out = "# settings: " + settings_to_json(report.settings).dump() + "\n";
  out += "lemma,r\n";
  for (const auto& e : report.per_lemma)
    out += io::csv_line({e.lemma, e.r ? io::format_number(*e.r) : std::string()});
  return out;
}

inline nlohmann::json ttest_to_json(const stats::TTestResult& t) {
  auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(io::format_number(x)); };
  return {{"variant", stats::to_string(t.variant)},
          {"t_statistic", num(t.t_statistic)},
          {"p_value", t.p_value},
          {"dof", t.dof},
          {"significant_05", t.significant_05}};
}

}  // namespace emocult
