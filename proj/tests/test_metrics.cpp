#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include <json.hpp>

#include "emocult/metrics.hpp"
#include "oracles.hpp"

using namespace emocult;
using Catch::Approx;
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

const std::vector<double> kJoyMono = {13.05, 9.85, 12.55, 2.23};
const std::vector<double> kJoyMulti = {28.44, 6.68, 28.48, 4.25};

}  // namespace

TEST_CASE("euclidean distance examples", "[metrics]") {
  CHECK(euclidean(Vector{0.3, -2.0, 7.0}, Vector{0.3, -2.0, 7.0}) == 0.0);
  CHECK(euclidean(Vector{0, 0}, Vector{3, 4}) == 5.0);
  CHECK(euclidean(Vector{1, 2, 3}, Vector{4, 6, 3}) == 5.0);
  CHECK(code_of([] { euclidean(Vector{1}, Vector{1, 2}); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("cosine distance examples", "[metrics]") {
  CHECK_THAT(cosine_distance(Vector{0.3, -2.0, 7.0}, Vector{0.3, -2.0, 7.0}), WithinAbs(0.0, 1e-15));
  CHECK(cosine_distance(Vector{1, 0}, Vector{0, 1}) == 1.0);
  CHECK(cosine_distance(Vector{1, 0}, Vector{-2, 0}) == 2.0);
  CHECK(code_of([] { cosine_distance(Vector{0, 0}, Vector{1, 2}); }) == ErrorCode::ZeroNorm);
  CHECK(code_of([] { cosine_distance(Vector{1, 2}, Vector{1, 2, 3}); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("pearson examples", "[metrics]") {
  Vector x = {0.5, -1.0, 3.0, 2.5, 8.0};
  Vector neg(x.size());
  std::transform(x.begin(), x.end(), neg.begin(), [](double v) { return -v; });
  CHECK_THAT(*pearson(x, x), WithinAbs(1.0, 1e-15));
  CHECK_THAT(*pearson(x, neg), WithinAbs(-1.0, 1e-15));
  CHECK_FALSE(pearson(Vector{2, 2, 2}, Vector{1, 2, 3}).has_value());
  CHECK_FALSE(pearson(Vector{1, 2, 3}, Vector{4, 4, 4}).has_value());
  CHECK(code_of([] { pearson(Vector{1, 2}, Vector{1, 2, 3}); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("pearson on the joy example distance vectors matches the exact-arithmetic oracle", "[metrics][oracle]") {
  const auto exact = oracle::joy_example_exact();
  // Integer sums of the values times 100, evaluated once by hand and by the oracle.
  CHECK(exact.numerator == 6587780);
  CHECK(exact.denominator_squared == 63683263048752);
  // Frozen from the exact quotient 6587780 / sqrt(63683263048752).
  constexpr double kFrozen = 0.8255177835637411677872655171820439315576;
  CHECK_THAT(static_cast<double>(exact.r), WithinAbs(kFrozen, 1e-15));
  CHECK_THAT(*pearson(kJoyMono, kJoyMulti), WithinAbs(kFrozen, 1e-12));
  CHECK(io::format_fixed(*pearson(kJoyMono, kJoyMulti), 3) == "0.826");
}

TEST_CASE("spearman examples", "[metrics]") {
  Vector x = {0.1, 0.7, -2.0, 3.5, 1.25, 9.0};
  Vector ex(x.size());
  std::transform(x.begin(), x.end(), ex.begin(), [](double v) { return std::exp(v); });
  CHECK_THAT(*spearman(x, ex), WithinAbs(1.0, 1e-15));
  CHECK_THAT(*spearman(Vector{1, 2, 3}, Vector{3, 2, 1}), WithinAbs(-1.0, 1e-15));
  CHECK_THAT(*spearman(Vector{1, 2, 2, 3}, Vector{1, 2, 2, 3}), WithinAbs(1.0, 1e-15));
  CHECK(fractional_ranks(Vector{10, 20, 20, 5}) == Vector{2, 3.5, 3.5, 1});
  CHECK_FALSE(spearman(Vector{4, 4, 4}, Vector{1, 2, 3}).has_value());
}

TEST_CASE("metrics agree with brute-force oracles on random inputs", "[metrics][oracle]") {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> len(2, 40);
  std::uniform_int_distribution<int> small(0, 4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = len(rng);
    auto u = testutil::gaussian_vector(rng, n, 3.0);
    auto v = testutil::gaussian_vector(rng, n, 3.0);
    CHECK_THAT(euclidean(u, v), WithinAbs(oracle::euclidean(u, v), 1e-12));
    CHECK_THAT(cosine_distance(u, v), WithinAbs(oracle::cosine_distance(u, v), 1e-12));
    CHECK_THAT(*pearson(u, v), WithinAbs(oracle::pearson(u, v), 1e-12));
    CHECK_THAT(*spearman(u, v), WithinAbs(oracle::spearman(u, v), 1e-12));
    // heavy ties
    Vector a(n), b(n);
    for (auto& x : a) x = small(rng);
    for (auto& x : b) x = small(rng);
    if (std::adjacent_find(a.begin(), a.end(), std::not_equal_to<>()) == a.end()) continue;
    if (std::adjacent_find(b.begin(), b.end(), std::not_equal_to<>()) == b.end()) continue;
    CHECK_THAT(*spearman(a, b), WithinAbs(oracle::spearman(a, b), 1e-12));
    CHECK(fractional_ranks(a) == oracle::ranks(a));
  }
}

TEST_CASE("distance_vector examples", "[metrics]") {
  EmbeddingSet s("toy", "en", 2);
  s.add("A", {0, 0});
  s.add("B", {3, 4});
  s.add("C", {6, 8});
  s.add("D", {0, 0});
  std::vector<LemmaId> others = {"B", "C"};
  CHECK(distance_vector(s, "A", others, DistanceKind::euclidean) == Vector{5, 10});
  std::vector<LemmaId> twin = {"D"};
  CHECK(distance_vector(s, "A", twin, DistanceKind::euclidean) == Vector{0});
  std::vector<LemmaId> missing = {"Z"};
  CHECK(code_of([&] { distance_vector(s, "A", missing, DistanceKind::euclidean); }) == ErrorCode::MissingLemma);

  // Joy at the example distance pattern from four other emotions.
  EmbeddingSet fig("toy", "en", 4);
  fig.add("joy", {0, 0, 0, 0});
  fig.add("anger", {13.05, 0, 0, 0});
  fig.add("fear", {0, 9.85, 0, 0});
  fig.add("sadness", {0, 0, 12.55, 0});
  fig.add("happiness", {0, 0, 0, 2.23});
  std::vector<LemmaId> four = {"anger", "fear", "sadness", "happiness"};
  CHECK(distance_vector(fig, "joy", four, DistanceKind::euclidean) == kJoyMono);
}

TEST_CASE("emotion_similarity reproduces the joy example value", "[metrics]") {
  auto lemmas = std::vector<std::string>{"joy", "anger", "fear", "sadness", "happiness"};
  auto lex = testutil::lexicon_for(lemmas);
  EmbeddingSet mono("mono", "en", 4), multi("multi", "en", 4);
  // Only Joy's row matters here; other lemmas sit on the coordinate axes.
  mono.add("joy", {0, 0, 0, 0});
  multi.add("joy", {0, 0, 0, 0});
  for (std::size_t i = 0; i < 4; ++i) {
    Vector a(4, 0.0), b(4, 0.0);
    a[i] = kJoyMono[i];
    b[i] = kJoyMulti[i];
    mono.add(lemmas[i + 1], a);
    multi.add(lemmas[i + 1], b);
  }
  auto pair = pair_sets(mono, multi, lex);
  auto r = emotion_similarity(pair, "joy", DistanceKind::euclidean, CorrelationKind::pearson);
  CHECK_THAT(*r, WithinAbs(static_cast<double>(oracle::joy_example_exact().r), 1e-12));
  CHECK(code_of([&] { emotion_similarity(pair, "pride", DistanceKind::euclidean, CorrelationKind::pearson); }) ==
        ErrorCode::MissingLemma);
}

TEST_CASE("shuffled spaces give correlations near zero", "[metrics][property]") {
  std::mt19937_64 rng(99);
  auto lemmas = testutil::lemma_names(271);
  auto lex = testutil::lexicon_for(lemmas);
  auto left = testutil::random_set(rng, lemmas, 8);
  double total = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    auto perm = lemmas;
    std::shuffle(perm.begin(), perm.end(), rng);
    EmbeddingSet right("shuffled", "en", 8);
    for (std::size_t i = 0; i < lemmas.size(); ++i) {
      auto v = left.at(perm[i]);
      right.add(lemmas[i], Vector(v.begin(), v.end()));
    }
    auto pair = pair_sets(left, right, lex);
    total += *emotion_similarity(pair, lemmas[trial], DistanceKind::euclidean, CorrelationKind::pearson);
  }
  CHECK(std::fabs(total / 100.0) < 0.1);
}

TEST_CASE("identical spaces give mean 1 and std 0", "[metrics]") {
  std::mt19937_64 rng(1);
  auto lemmas = testutil::lemma_names(12);
  auto lex = testutil::lexicon_for(lemmas);
  auto a = testutil::random_set(rng, lemmas, 6);
  for (auto kind : {DistanceKind::euclidean, DistanceKind::cosine})
    for (auto corr : {CorrelationKind::pearson, CorrelationKind::spearman}) {
      auto report = aggregate_similarity(pair_sets(a, a, lex), kind, corr);
      CHECK_THAT(report.mean_r, WithinAbs(1.0, 1e-12));
      CHECK_THAT(report.std_r, WithinAbs(0.0, 1e-7));
      CHECK(report.n_valid == 12);
    }
}

TEST_CASE("aggregate_similarity matches the committed golden report", "[metrics][golden]") {
  const std::filesystem::path fixtures = std::filesystem::path(EMOCULT_DATA_DIR) / "fixtures";
  auto lex = load_lexicon(fixtures / "synthetic_lexicon.jsonl");
  auto left = load_embeddings(fixtures / "synthetic_left.jsonl", lex);
  auto right = load_embeddings(fixtures / "synthetic_right.jsonl", lex);
  auto report = aggregate_similarity(pair_sets(left, right, lex), DistanceKind::euclidean, CorrelationKind::pearson);
  auto golden = nlohmann::json::parse(testutil::read_file(std::filesystem::path(EMOCULT_GOLDEN_DIR) / "synthetic_similarity.json"));
  REQUIRE(report.per_lemma.size() == golden["per_lemma"].size());
  for (std::size_t i = 0; i < report.per_lemma.size(); ++i) {
    CHECK(report.per_lemma[i].lemma == golden["per_lemma"][i]["lemma"].get<std::string>());
    CHECK_THAT(*report.per_lemma[i].r, WithinAbs(golden["per_lemma"][i]["r"].get<double>(), 1e-12));
  }
  CHECK_THAT(report.mean_r, WithinAbs(golden["mean_r"].get<double>(), 1e-12));
  CHECK_THAT(report.std_r, WithinAbs(golden["std_r"].get<double>(), 1e-12));
}

TEST_CASE("mean and std follow a spreadsheet-style recomputation", "[metrics]") {
  SimilarityReport report;
  const std::vector<double> rs = {0.9, 0.85, 0.1, -0.2, 0.5, 0.75, 0.3, 0.95, 0.6, 0.0};
  for (std::size_t i = 0; i < rs.size(); ++i) report.per_lemma.push_back({"e" + std::to_string(i), rs[i]});
  report.per_lemma.push_back({"undefined", std::nullopt});
  auto j = report_to_json(report);
  auto back = report_from_json(j);  // recomputes the summary
  // =AVERAGE(...) and =STDEV.P(...) over the ten values: in hundredths the
  // mean is 47.5 and the squared deviations sum to 14912.5, so the variance is 0.149125.
  CHECK_THAT(back.mean_r, WithinAbs(0.475, 1e-15));
  CHECK_THAT(back.std_r, WithinAbs(std::sqrt(0.149125), 1e-15));
  CHECK(back.n_valid == 10);
  CHECK(j["per_lemma"][10]["r"].is_null());
}

TEST_CASE("constant distance vectors are undefined, not zero", "[metrics]") {
  auto lemmas = std::vector<std::string>{"a", "b", "c", "d"};
  auto lex = testutil::lexicon_for(lemmas);
  EmbeddingSet left("l", "en", 2), right("r", "en", 2);
  left.add("a", {0, 0});
  left.add("b", {1, 0});
  left.add("c", {0, 2});
  left.add("d", {3, 3});
  // In the right space b, c and d share one vector (a duplicated translation),
  // so a's distance vector is constant.
  right.add("a", {0, 0});
  right.add("b", {1, 1});
  right.add("c", {1, 1});
  right.add("d", {1, 1});
  auto report = aggregate_similarity(pair_sets(left, right, lex), DistanceKind::euclidean, CorrelationKind::pearson);
  CHECK_FALSE(report.per_lemma[0].r.has_value());
  CHECK(report.n_valid < 4);
  auto csv = report_to_csv(report);
  CHECK(csv.find("\na,\n") != std::string::npos);

  EmbeddingSet flat("f", "en", 2);
  for (const auto& l : lemmas) flat.add(l, {1, 1});
  CHECK(code_of([&] {
          aggregate_similarity(pair_sets(left, flat, lex), DistanceKind::euclidean, CorrelationKind::pearson);
        }) == ErrorCode::NoValidCorrelations);
  CHECK(code_of([&] {
          EmbeddingSet zero("z", "en", 2);
          for (const auto& l : lemmas) zero.add(l, {0, 0});
          aggregate_similarity(pair_sets(left, zero, lex), DistanceKind::cosine, CorrelationKind::pearson);
        }) == ErrorCode::ZeroNorm);
}

TEST_CASE("similarity properties on random spaces", "[metrics][property]") {
  std::mt19937_64 rng(424242);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 3 + trial % 20;
    auto lemmas = testutil::lemma_names(n);
    auto lex = testutil::lexicon_for(lemmas);
    auto a = testutil::random_set(rng, lemmas, 2 + trial % 7);
    auto b = testutil::random_set(rng, lemmas, 3 + trial % 5);
    auto ab = pair_sets(a, b, lex);
    auto ba = pair_sets(b, a, lex);
    for (auto kind : {DistanceKind::euclidean, DistanceKind::cosine})
      for (auto corr : {CorrelationKind::pearson, CorrelationKind::spearman}) {
        auto rep = aggregate_similarity(ab, kind, corr);
        double lo = 2, hi = -2;
        for (std::size_t i = 0; i < n; ++i) {
          const auto& e = rep.per_lemma[i];
          REQUIRE(e.r.has_value());
          // symmetry
          CHECK_THAT(*emotion_similarity(ba, e.lemma, kind, corr), WithinAbs(*e.r, 1e-12));
          // the matrix path equals the per-lemma path
          CHECK_THAT(*emotion_similarity(ab, e.lemma, kind, corr), WithinAbs(*e.r, 1e-12));
          CHECK(*e.r >= -1.0);
          CHECK(*e.r <= 1.0);
          lo = std::min(lo, *e.r);
          hi = std::max(hi, *e.r);
        }
        CHECK(rep.mean_r >= lo - 1e-15);
        CHECK(rep.mean_r <= hi + 1e-15);
      }
  }
}

TEST_CASE("isometry invariance of euclidean + pearson", "[metrics][property]") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> scale(0.05, 20.0);
  for (int trial = 0; trial < 10; ++trial) {
    auto lemmas = testutil::lemma_names(25);
    auto lex = testutil::lexicon_for(lemmas);
    auto a = testutil::random_set(rng, lemmas, 6);
    auto b = testutil::random_set(rng, lemmas, 9);
    auto moved = testutil::similarity_transform(a, testutil::random_orthogonal(rng, 6), scale(rng),
                                                testutil::gaussian_vector(rng, 6, 50.0));
    auto base = aggregate_similarity(pair_sets(a, b, lex), DistanceKind::euclidean, CorrelationKind::pearson);
    auto after = aggregate_similarity(pair_sets(moved, b, lex), DistanceKind::euclidean, CorrelationKind::pearson);
    for (std::size_t i = 0; i < lemmas.size(); ++i)
      CHECK_THAT(*after.per_lemma[i].r, WithinAbs(*base.per_lemma[i].r, 1e-9));
    auto self = aggregate_similarity(pair_sets(a, moved, lex), DistanceKind::euclidean, CorrelationKind::pearson);
    CHECK_THAT(self.mean_r, WithinAbs(1.0, 1e-9));
    CHECK(self.std_r < 1e-9);
  }
}

TEST_CASE("spearman is invariant under increasing transforms of distances", "[metrics][property]") {
  std::mt19937_64 rng(12);
  std::vector<std::function<double(double)>> transforms = {
      [](double d) { return d * d * d; }, [](double d) { return std::log1p(d); },
      [](double d) { return std::exp(0.3 * d); }, [](double d) { return 4.0 * d + 1.0; }};
  for (int trial = 0; trial < 40; ++trial) {
    auto x = testutil::gaussian_vector(rng, 20);
    auto y = testutil::gaussian_vector(rng, 20);
    for (auto& v : x) v = std::fabs(v);
    const double base = *spearman(x, y);
    for (const auto& f : transforms) {
      Vector fx(x.size());
      std::transform(x.begin(), x.end(), fx.begin(), f);
      CHECK_THAT(*spearman(fx, y), WithinAbs(base, 1e-12));
    }
  }
}

TEST_CASE("aggregate_similarity equals naive recomputation on tiny sets", "[metrics][oracle]") {
  std::mt19937_64 rng(31337);
  for (int set = 0; set < 10; ++set) {
    const std::size_t n = 3 + set % 6;
    auto lemmas = testutil::lemma_names(n);
    auto lex = testutil::lexicon_for(lemmas);
    auto a = testutil::random_set(rng, lemmas, 1 + set % 4);
    auto b = testutil::random_set(rng, lemmas, 1 + (set + 2) % 4);
    auto rep = aggregate_similarity(pair_sets(a, b, lex), DistanceKind::euclidean, CorrelationKind::pearson);
    auto naive = oracle::similarity(a, b, lemmas);
    for (std::size_t i = 0; i < n; ++i) CHECK_THAT(*rep.per_lemma[i].r, WithinAbs(naive.r[i], 1e-12));
    CHECK_THAT(rep.mean_r, WithinAbs(naive.mean, 1e-12));
    CHECK_THAT(rep.std_r, WithinAbs(naive.std, 1e-12));
  }
}

TEST_CASE("report serialization", "[metrics]") {
  std::mt19937_64 rng(2);
  auto lemmas = testutil::lemma_names(6);
  auto lex = testutil::lexicon_for(lemmas);
  auto a = testutil::random_set(rng, lemmas, 3, "left-model");
  auto b = testutil::random_set(rng, lemmas, 3, "right-model");
  auto rep = aggregate_similarity(pair_sets(a, b, lex), DistanceKind::cosine, CorrelationKind::spearman);
  auto j = report_to_json(rep);
  CHECK(j["settings"]["distance"] == "cosine");
  CHECK(j["settings"]["correlation"] == "spearman");
  CHECK(j["settings"]["std"] == "population");
  CHECK(j["settings"]["left"]["model_id"] == "left-model");
  auto back = report_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.mean_r == rep.mean_r);
  CHECK(back.std_r == rep.std_r);
  for (std::size_t i = 0; i < lemmas.size(); ++i) CHECK(back.per_lemma[i].r == rep.per_lemma[i].r);
  auto csv = report_to_csv(rep);
  CHECK(csv.rfind("# settings: {", 0) == 0);
  CHECK(csv.find("\nlemma,r\n") != std::string::npos);

  CHECK(parse_distance_kind("cosine") == DistanceKind::cosine);
  CHECK(code_of([] { parse_distance_kind("manhattan"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse_correlation_kind("kendall"); }) == ErrorCode::InvalidConfig);
}
