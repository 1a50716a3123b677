#pragma once

// Projection of emotion embeddings onto the Valence-Arousal plane.
//
// Four anchor points (positive/negative valence, high/low arousal) are means
// of embeddings of circumplex emotions. The valence axis runs from the
// negative to the positive valence anchor, the arousal axis from low to high.
// A vector is projected onto each unit axis relative to that axis' midpoint,
// scaled so the positive anchor sits at +1 on its own axis, and the two
// components are then sheared by the cosine between the axes so that
// correlated axes do not double count shared direction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "emocult/corpus.hpp"
#include "emocult/error.hpp"
#include "emocult/io.hpp"

namespace emocult {

/// Lemma lists whose mean embeddings define the four anchors.
struct AnchorLexicon {
  std::vector<LemmaId> positive_valence;
  std::vector<LemmaId> negative_valence;
  std::vector<LemmaId> high_arousal;
  std::vector<LemmaId> low_arousal;
  std::string version;

  /// Five circumplex emotions nearest each axis point (Russell).
  static AnchorLexicon russell_defaults() {
    return {{"happy", "pleased", "delighted", "excited", "satisfied"},
            {"miserable", "frustrated", "sad", "depressed", "afraid"},
            {"astonished", "alarmed", "angry", "afraid", "excited"},
            {"tired", "sleepy", "calm", "satisfied", "depressed"},
            "russell-5nn-v1"};
  }

  void validate() const {
    if (positive_valence.empty() || negative_valence.empty() || high_arousal.empty() || low_arousal.empty())
      throw Error(ErrorCode::InvalidConfig, "every anchor list needs at least one lemma");
  }
};

inline nlohmann::json anchor_lexicon_to_json(const AnchorLexicon& a) {
  return {{"version", a.version}, {"PV", a.positive_valence}, {"NV", a.negative_valence},
          {"HA", a.high_arousal}, {"LA", a.low_arousal}};
}

inline AnchorLexicon anchor_lexicon_from_json(const nlohmann::json& j) {
  try {
    AnchorLexicon a;
    a.positive_valence = j.at("PV").get<std::vector<LemmaId>>();
    a.negative_valence = j.at("NV").get<std::vector<LemmaId>>();
    a.high_arousal = j.at("HA").get<std::vector<LemmaId>>();
    a.low_arousal = j.at("LA").get<std::vector<LemmaId>>();
    a.version = j.value("version", "");
    a.validate();
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("anchor lexicon: ") + e.what());
  }
}

inline AnchorLexicon load_anchor_lexicon(const std::filesystem::path& path) {
  auto in = io::open_input(path);
  try {
    return anchor_lexicon_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

struct AnchorSource {
  std::vector<std::string> model_ids;
  std::vector<LanguageCode> languages;
  AnchorLexicon lexicon;
};

struct AxisAnchors {
  Vector v_pos, v_neg, a_high, a_low;
  AnchorSource source;

  std::size_t dim() const noexcept { return v_pos.size(); }
};

struct PlanePoint {
  double valence = 0.0;
  double arousal = 0.0;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Vector mean_of(const EmbeddingSet& set, const std::vector<LemmaId>& lemmas) {
  Vector out(set.dim(), 0.0);
  for (const auto& l : lemmas) {
    if (!set.contains(l))
      throw Error(ErrorCode::MissingLemma, "anchor lemma '" + l + "' missing from " + set.model_id() + "/" +
                                               set.language());
    auto v = set.at(l);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
  }
  for (double& x : out) x /= static_cast<double>(lemmas.size());
  return out;
}

inline Vector difference(std::span<const double> a, std::span<const double> b) {
  Vector d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

inline constexpr double kDegenerateAxisNorm = 1e-12;

inline void check_axes(const AxisAnchors& a) {
  const std::size_t n = a.v_pos.size();
  if (n == 0 || a.v_neg.size() != n || a.a_high.size() != n || a.a_low.size() != n)
    throw Error(ErrorCode::LengthMismatch, "anchor vectors differ in length");
  if (std::sqrt(dot(difference(a.v_pos, a.v_neg), difference(a.v_pos, a.v_neg))) <= kDegenerateAxisNorm)
    throw Error(ErrorCode::DegenerateAxis, "positive and negative valence anchors coincide");
  if (std::sqrt(dot(difference(a.a_high, a.a_low), difference(a.a_high, a.a_low))) <= kDegenerateAxisNorm)
    throw Error(ErrorCode::DegenerateAxis, "high and low arousal anchors coincide");
}

}  // namespace detail

inline AxisAnchors build_anchors(const EmbeddingSet& set, const AnchorLexicon& anchors) {
  anchors.validate();
  AxisAnchors out{detail::mean_of(set, anchors.positive_valence), detail::mean_of(set, anchors.negative_valence),
                  detail::mean_of(set, anchors.high_arousal), detail::mean_of(set, anchors.low_arousal),
                  AnchorSource{{set.model_id()}, {set.language()}, anchors}};
  detail::check_axes(out);
  return out;
}

/// Component-wise mean of each anchor across the inputs (multilingual axes).
inline AxisAnchors merge_anchors(std::span<const AxisAnchors> inputs) {
  if (inputs.empty()) throw Error(ErrorCode::EmptyInput, "no anchors to merge");
  const std::size_t n = inputs.front().dim();
  AxisAnchors out{Vector(n, 0.0), Vector(n, 0.0), Vector(n, 0.0), Vector(n, 0.0), {}};
  out.source.lexicon = inputs.front().source.lexicon;
  for (const auto& a : inputs) {
    if (a.dim() != n || a.v_neg.size() != n || a.a_high.size() != n || a.a_low.size() != n)
      throw Error(ErrorCode::LengthMismatch, "cannot merge anchors of different dimension");
    for (std::size_t i = 0; i < n; ++i) {
      out.v_pos[i] += a.v_pos[i];
      out.v_neg[i] += a.v_neg[i];
      out.a_high[i] += a.a_high[i];
      out.a_low[i] += a.a_low[i];
    }
    for (const auto& m : a.source.model_ids) out.source.model_ids.push_back(m);
    for (const auto& l : a.source.languages) out.source.languages.push_back(l);
  }
  const double k = static_cast<double>(inputs.size());
  for (std::size_t i = 0; i < n; ++i) {
    out.v_pos[i] /= k;
    out.v_neg[i] /= k;
    out.a_high[i] /= k;
    out.a_low[i] /= k;
  }
  return out;
}

/// Cosine of the angle between the valence and arousal axes.
inline double axis_cosine(const AxisAnchors& anchors) {
  detail::check_axes(anchors);
  auto v = detail::difference(anchors.v_pos, anchors.v_neg);
  auto a = detail::difference(anchors.a_high, anchors.a_low);
  return std::clamp(detail::dot(v, a) / (std::sqrt(detail::dot(v, v)) * std::sqrt(detail::dot(a, a))), -1.0, 1.0);
}

inline constexpr double kDegeneratePlaneTolerance = 1e-9;

/// Precomputed plane for repeated projection with one set of anchors.
class PlaneProjection {
 public:
  explicit PlaneProjection(const AxisAnchors& anchors) {
    detail::check_axes(anchors);
    const std::size_t n = anchors.dim();
    valence_axis_ = detail::difference(anchors.v_pos, anchors.v_neg);
    arousal_axis_ = detail::difference(anchors.a_high, anchors.a_low);
    const double v_norm = std::sqrt(detail::dot(valence_axis_, valence_axis_));
    const double a_norm = std::sqrt(detail::dot(arousal_axis_, arousal_axis_));
    for (double& x : valence_axis_) x /= v_norm;
    for (double& x : arousal_axis_) x /= a_norm;

    valence_mid_.resize(n);
    arousal_mid_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      valence_mid_[i] = (anchors.v_pos[i] + anchors.v_neg[i]) / 2.0;
      arousal_mid_[i] = (anchors.a_high[i] + anchors.a_low[i]) / 2.0;
    }
    // Own-axis component of each positive anchor; dividing by it puts that anchor at +1.
    valence_scale_ = detail::dot(detail::difference(anchors.v_pos, valence_mid_), valence_axis_);
    arousal_scale_ = detail::dot(detail::difference(anchors.a_high, arousal_mid_), arousal_axis_);

    cos_theta_ = std::clamp(detail::dot(valence_axis_, arousal_axis_), -1.0, 1.0);
    if (std::fabs(cos_theta_) >= 1.0 - kDegeneratePlaneTolerance)
      throw Error(ErrorCode::DegeneratePlane,
                  "valence and arousal axes are nearly parallel (cos theta = " + io::format_number(cos_theta_) + ")");
  }

  double cos_theta() const noexcept { return cos_theta_; }
  std::size_t dim() const noexcept { return valence_axis_.size(); }

  /// Scaled axis components before the orthogonality correction.
  PlanePoint raw_components(std::span<const double> x) const {
    if (x.size() != dim())
      throw Error(ErrorCode::LengthMismatch, "vector of length " + std::to_string(x.size()) +
                                                 " projected onto anchors of length " + std::to_string(dim()));
    double xv = 0.0, xa = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      xv += (x[i] - valence_mid_[i]) * valence_axis_[i];
      xa += (x[i] - arousal_mid_[i]) * arousal_axis_[i];
    }
    return {xv / valence_scale_, xa / arousal_scale_};
  }

  PlanePoint project(std::span<const double> x) const {
    auto raw = raw_components(x);
    return {raw.valence - raw.arousal * cos_theta_, raw.arousal - raw.valence * cos_theta_};
  }

 private:
  Vector valence_axis_, arousal_axis_;
  Vector valence_mid_, arousal_mid_;
  double valence_scale_ = 1.0;
  double arousal_scale_ = 1.0;
  double cos_theta_ = 0.0;
};

inline PlanePoint project(const AxisAnchors& anchors, std::span<const double> x) {
  return PlaneProjection(anchors).project(x);
}

struct LabeledVector {
  std::string label;
  Vector vector;
};

struct LabeledPoint {
  std::string label;
  PlanePoint point;
};

inline std::vector<LabeledPoint> project_batch(const AxisAnchors& anchors, std::span<const LabeledVector> items) {
  std::vector<LabeledPoint> out;
  if (items.empty()) return out;
  PlaneProjection plane(anchors);
  out.reserve(items.size());
  for (const auto& item : items) out.push_back({item.label, plane.project(item.vector)});
  return out;
}

}  // namespace emocult
