#include <catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "emocult/circumplex.hpp"
#include "emocult/io.hpp"
#include "oracles.hpp"

using namespace emocult;
using Catch::Matchers::WithinAbs;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an emocult::Error");
  return ErrorCode::ParseError;
}

AxisAnchors axes(Vector vp, Vector vn, Vector ah, Vector al) {
  return {std::move(vp), std::move(vn), std::move(ah), std::move(al), {}};
}

AxisAnchors orthogonal3() { return axes({1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}); }

AnchorLexicon single_lemma_lexicon() { return {{"pv"}, {"nv"}, {"ha"}, {"la"}, "test"}; }

AxisAnchors random_axes(std::mt19937_64& rng, std::size_t dim) {
  return axes(testutil::gaussian_vector(rng, dim), testutil::gaussian_vector(rng, dim),
              testutil::gaussian_vector(rng, dim), testutil::gaussian_vector(rng, dim));
}

}  // namespace

TEST_CASE("build_anchors averages each list", "[circumplex]") {
  EmbeddingSet s("m", "en", 2);
  s.add("pv", {1, 0});
  s.add("pv2", {0, 1});
  s.add("nv", {-1, 0});
  s.add("ha", {0, 3});
  s.add("la", {0, -3});
  s.add("twin", {1, 0});

  auto one = build_anchors(s, single_lemma_lexicon());
  CHECK(one.v_pos == Vector{1, 0});
  CHECK(one.v_neg == Vector{-1, 0});
  CHECK(one.a_high == Vector{0, 3});
  CHECK(one.a_low == Vector{0, -3});
  CHECK(one.source.languages == std::vector<std::string>{"en"});

  AnchorLexicon twins{{"pv", "twin"}, {"nv"}, {"ha"}, {"la"}, "test"};
  CHECK(build_anchors(s, twins).v_pos == Vector{1, 0});
  AnchorLexicon halves{{"pv", "pv2"}, {"nv"}, {"ha"}, {"la"}, "test"};
  CHECK(build_anchors(s, halves).v_pos == Vector{0.5, 0.5});

  AnchorLexicon missing{{"pv", "nope"}, {"nv"}, {"ha"}, {"la"}, "test"};
  CHECK(code_of([&] { build_anchors(s, missing); }) == ErrorCode::MissingLemma);
  AnchorLexicon flat{{"pv"}, {"twin"}, {"ha"}, {"la"}, "test"};
  CHECK(code_of([&] { build_anchors(s, flat); }) == ErrorCode::DegenerateAxis);
  AnchorLexicon empty{{}, {"nv"}, {"ha"}, {"la"}, "test"};
  CHECK(code_of([&] { build_anchors(s, empty); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("default anchors are the five nearest circumplex emotions", "[circumplex]") {
  auto a = AnchorLexicon::russell_defaults();
  CHECK(a.positive_valence == std::vector<std::string>{"happy", "pleased", "delighted", "excited", "satisfied"});
  CHECK(a.negative_valence == std::vector<std::string>{"miserable", "frustrated", "sad", "depressed", "afraid"});
  CHECK(a.high_arousal == std::vector<std::string>{"astonished", "alarmed", "angry", "afraid", "excited"});
  CHECK(a.low_arousal == std::vector<std::string>{"tired", "sleepy", "calm", "satisfied", "depressed"});
  auto shipped = load_anchor_lexicon(std::filesystem::path(EMOCULT_DATA_DIR) / "anchors" / "russell_five_nearest.json");
  CHECK(shipped.positive_valence == a.positive_valence);
  CHECK(shipped.negative_valence == a.negative_valence);
  CHECK(shipped.high_arousal == a.high_arousal);
  CHECK(shipped.low_arousal == a.low_arousal);
  CHECK(shipped.version == a.version);
  auto j = anchor_lexicon_to_json(a);
  CHECK(anchor_lexicon_from_json(j).low_arousal == a.low_arousal);
  CHECK(code_of([] { anchor_lexicon_from_json(nlohmann::json{{"PV", {"a"}}}); }) == ErrorCode::ParseError);
}

TEST_CASE("merge_anchors", "[circumplex]") {
  auto en = axes({1, 0}, {-1, 0}, {0, 1}, {0, -1});
  en.source.languages = {"en"};
  auto ja = axes({0, 1}, {-1, -1}, {2, 2}, {0, -3});
  ja.source.languages = {"ja"};

  std::vector<AxisAnchors> just_en = {en};
  auto m1 = merge_anchors(just_en);
  CHECK(m1.v_pos == en.v_pos);
  CHECK(m1.a_low == en.a_low);

  std::vector<AxisAnchors> twice = {en, en};
  CHECK(merge_anchors(twice).v_neg == en.v_neg);

  std::vector<AxisAnchors> both = {en, ja};
  auto m = merge_anchors(both);
  CHECK(m.v_pos == Vector{0.5, 0.5});
  CHECK(m.source.languages == std::vector<std::string>{"en", "ja"});

  std::vector<AxisAnchors> none;
  CHECK(code_of([&] { merge_anchors(none); }) == ErrorCode::EmptyInput);
  std::vector<AxisAnchors> mixed = {en, orthogonal3()};
  CHECK(code_of([&] { merge_anchors(mixed); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("merge_anchors is idempotent and permutation-invariant", "[circumplex][property]") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<AxisAnchors> list;
    const std::size_t k = 1 + trial % 5;
    for (std::size_t i = 0; i < k; ++i) list.push_back(random_axes(rng, 5));
    auto merged = merge_anchors(list);
    std::vector<AxisAnchors> again = {merged, merged, merged};
    auto idem = merge_anchors(again);
    auto shuffled = list;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto perm = merge_anchors(shuffled);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK_THAT(idem.v_pos[i], WithinAbs(merged.v_pos[i], 1e-15));
      CHECK_THAT(idem.a_low[i], WithinAbs(merged.a_low[i], 1e-15));
      CHECK_THAT(perm.v_pos[i], WithinAbs(merged.v_pos[i], 1e-14));
      CHECK_THAT(perm.v_neg[i], WithinAbs(merged.v_neg[i], 1e-14));
      CHECK_THAT(perm.a_high[i], WithinAbs(merged.a_high[i], 1e-14));
      CHECK_THAT(perm.a_low[i], WithinAbs(merged.a_low[i], 1e-14));
    }
  }
}

TEST_CASE("axis_cosine", "[circumplex]") {
  CHECK(axis_cosine(orthogonal3()) == 0.0);
  auto same = axes({1, 0, 0}, {0, 0, 0}, {1, 0, 0}, {0, 0, 0});
  CHECK_THAT(axis_cosine(same), WithinAbs(1.0, 1e-15));
  CHECK(code_of([&] { PlaneProjection p(same); }) == ErrorCode::DegeneratePlane);
  auto tilted = axes({1, 0, 0}, {0, 0, 0}, {1, 1, 0}, {0, 0, 0});
  CHECK_THAT(axis_cosine(tilted), WithinAbs(std::sqrt(0.5), 1e-15));
  CHECK(io::format_fixed(axis_cosine(tilted), 5) == "0.70711");
  auto flat = axes({1, 0}, {1, 0}, {0, 1}, {0, -1});
  CHECK(code_of([&] { axis_cosine(flat); }) == ErrorCode::DegenerateAxis);
}

TEST_CASE("projection identities", "[circumplex]") {
  auto a = orthogonal3();
  auto p = project(a, Vector{1, 0, 0});
  CHECK(p.valence == 1.0);
  CHECK(p.arousal == 0.0);
  p = project(a, Vector{0, -1, 0});
  CHECK(p.valence == 0.0);
  CHECK(p.arousal == -1.0);
  p = project(a, Vector{0, 0, 5});
  CHECK(p.valence == 0.0);
  CHECK(p.arousal == 0.0);
  CHECK(code_of([&] { project(a, Vector{1, 0}); }) == ErrorCode::LengthMismatch);

  // Anchors off the origin with unequal spreads still land on the unit markers.
  auto shifted = axes({4, 1, 1}, {0, 1, 1}, {2, 4, 1}, {2, -2, 1});
  auto vp = project(shifted, shifted.v_pos);
  auto vn = project(shifted, shifted.v_neg);
  auto ah = project(shifted, shifted.a_high);
  CHECK_THAT(vp.valence, WithinAbs(1.0, 1e-12));
  CHECK_THAT(vn.valence, WithinAbs(-1.0, 1e-12));
  CHECK_THAT(ah.arousal, WithinAbs(1.0, 1e-12));
}

TEST_CASE("non-orthogonal worked example", "[circumplex]") {
  const double h = std::sqrt(2.0) / 2.0;
  // V-hat = [1,0], A-hat = [h,h], both midpoints at the origin, unit scales.
  auto a = axes({1, 0}, {-1, 0}, {h, h}, {-h, -h});
  PlaneProjection plane(a);
  CHECK_THAT(plane.cos_theta(), WithinAbs(h, 1e-15));
  const Vector x = {1.0, std::sqrt(2.0) - 1.0};  // x.V-hat = 1, x.A-hat = 1
  auto raw = plane.raw_components(x);
  CHECK_THAT(raw.valence, WithinAbs(1.0, 1e-12));
  CHECK_THAT(raw.arousal, WithinAbs(1.0, 1e-12));
  auto p = plane.project(x);
  CHECK_THAT(p.valence, WithinAbs(1.0 - h, 1e-9));
  CHECK_THAT(p.arousal, WithinAbs(1.0 - h, 1e-9));
  CHECK(io::format_fixed(p.valence, 4) == "0.2929");
}

TEST_CASE("projection properties", "[circumplex][property]") {
  std::mt19937_64 rng(100);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = 2 + trial % 9;
    auto a = random_axes(rng, dim);
    PlaneProjection plane(a);
    auto x = testutil::gaussian_vector(rng, dim, 2.0);
    auto y = testutil::gaussian_vector(rng, dim, 2.0);
    const double alpha = unit(rng);

    // linearity over affine combinations
    Vector mix(dim);
    for (std::size_t i = 0; i < dim; ++i) mix[i] = alpha * x[i] + (1.0 - alpha) * y[i];
    auto px = plane.project(x), py = plane.project(y), pm = plane.project(mix);
    CHECK_THAT(pm.valence, WithinAbs(alpha * px.valence + (1 - alpha) * py.valence, 1e-9));
    CHECK_THAT(pm.arousal, WithinAbs(alpha * px.arousal + (1 - alpha) * py.arousal, 1e-9));

    // translation of anchors and input together
    auto t = testutil::gaussian_vector(rng, dim, 5.0);
    auto shift = [&](Vector v) {
      for (std::size_t i = 0; i < dim; ++i) v[i] += t[i];
      return v;
    };
    auto moved = axes(shift(a.v_pos), shift(a.v_neg), shift(a.a_high), shift(a.a_low));
    auto pt = project(moved, shift(x));
    CHECK_THAT(pt.valence, WithinAbs(px.valence, 1e-9));
    CHECK_THAT(pt.arousal, WithinAbs(px.arousal, 1e-9));

    // uniform scaling of anchors and input together
    const double c = scale(rng);
    auto mul = [&](Vector v) {
      for (double& e : v) e *= c;
      return v;
    };
    auto scaled = axes(mul(a.v_pos), mul(a.v_neg), mul(a.a_high), mul(a.a_low));
    auto ps = project(scaled, mul(x));
    CHECK_THAT(ps.valence, WithinAbs(px.valence, 1e-9));
    CHECK_THAT(ps.arousal, WithinAbs(px.arousal, 1e-9));
  }
}

TEST_CASE("orthogonal axes make the correction the identity", "[circumplex][property]") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t dim = 3 + trial % 6;
    auto q = testutil::random_orthogonal(rng, dim);
    auto mid = testutil::gaussian_vector(rng, dim);
    auto at = [&](std::size_t row, double k) {
      Vector v = mid;
      for (std::size_t i = 0; i < dim; ++i) v[i] += k * q[row][i];
      return v;
    };
    std::uniform_real_distribution<double> spread(0.5, 3.0);
    auto a = axes(at(0, spread(rng)), at(0, -spread(rng)), at(1, spread(rng)), at(1, -spread(rng)));
    PlaneProjection plane(a);
    CHECK_THAT(plane.cos_theta(), WithinAbs(0.0, 1e-12));
    auto x = testutil::gaussian_vector(rng, dim);
    auto raw = plane.raw_components(x);
    auto p = plane.project(x);
    CHECK_THAT(p.valence, WithinAbs(raw.valence, 1e-12));
    CHECK_THAT(p.arousal, WithinAbs(raw.arousal, 1e-12));
  }
}

TEST_CASE("project_batch", "[circumplex]") {
  auto a = orthogonal3();
  std::vector<LabeledVector> none;
  CHECK(project_batch(a, none).empty());
  std::vector<LabeledVector> one = {{"x", {0.25, 0.5, 3}}};
  auto out = project_batch(a, one);
  REQUIRE(out.size() == 1);
  CHECK(out[0].label == "x");
  CHECK(out[0].point.valence == project(a, one[0].vector).valence);
  CHECK(out[0].point.arousal == project(a, one[0].vector).arousal);
}

TEST_CASE("Ekman fixture lands on the stored coordinates bit for bit", "[circumplex][fixture]") {
  const auto dir = std::filesystem::path(EMOCULT_DATA_DIR) / "fixtures";
  auto lex = load_lexicon(dir / "ekman_lexicon.jsonl");
  auto set = load_embeddings(dir / "ekman_embeddings.jsonl", lex);
  auto anchors = build_anchors(set, AnchorLexicon::russell_defaults());
  CHECK(axis_cosine(anchors) == 0.0);

  auto in = io::open_input(dir / "ekman_points.csv");
  auto rows = io::read_csv(in);
  REQUIRE(rows.size() == 7);
  std::vector<LabeledVector> items;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    auto v = set.at(rows[i].fields[0]);
    items.push_back({rows[i].fields[0], Vector(v.begin(), v.end())});
  }
  auto points = project_batch(anchors, items);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    INFO(rows[i].fields[0]);
    CHECK(points[i - 1].label == rows[i].fields[0]);
    CHECK(points[i - 1].point.valence == std::stod(rows[i].fields[1]));
    CHECK(points[i - 1].point.arousal == std::stod(rows[i].fields[2]));
  }
}
