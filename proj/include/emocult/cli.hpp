#pragma once

// Command implementations behind the emocult executable. Each command takes a
// validated config, writes its artifacts under the output directory, prints a
// short summary, and returns the process exit code:
//   0 success, 1 invalid input or configuration, 2 computation failure.

#include <cctype>
#include <exception>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "emocult/circumplex.hpp"
#include "emocult/corpus.hpp"
#include "emocult/error.hpp"
#include "emocult/genprob.hpp"
#include "emocult/io.hpp"
#include "emocult/metrics.hpp"
#include "emocult/stats.hpp"
#include "emocult/study.hpp"
#include "emocult/svg.hpp"

namespace emocult::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kSuccess = 0, kValidationError = 1, kComputationError = 2 };

struct OutputOptions {
  fs::path out_dir = ".";
  std::set<std::string> formats = {"csv", "json", "svg"};

  bool wants(const std::string& f) const { return formats.count(f) > 0; }
};

inline std::set<std::string> parse_formats(const std::string& list) {
  std::set<std::string> out;
  for (const auto& part : io::split(list, ',')) {
    auto f = std::string(io::trim(part));
    if (f.empty()) continue;
    if (f != "csv" && f != "json" && f != "svg") throw Error(ErrorCode::InvalidConfig, "unknown format '" + f + "'");
    out.insert(f);
  }
  return out;
}

inline void require_file(const fs::path& p, const char* what) {
  if (p.empty()) throw Error(ErrorCode::InvalidConfig, std::string(what) + " path is required");
  if (!fs::is_regular_file(p)) throw Error(ErrorCode::InvalidConfig, std::string(what) + " '" + p.string() + "' not found");
}

/// Runs `body`, mapping library errors onto exit codes with a diagnostic on `err`.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    body();
    return kSuccess;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_computation_error(e.code()) ? kComputationError : kValidationError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }
}

// --------------------------------------------------------------------------
// similarity
// --------------------------------------------------------------------------

struct SimilarityConfig {
  fs::path lexicon;
  fs::path left;
  fs::path right;
  DistanceKind distance = DistanceKind::euclidean;
  CorrelationKind correlation = CorrelationKind::pearson;
  stats::TTestVariant ttest_variant = stats::TTestVariant::welch;
  std::optional<fs::path> ttest_against;
  OutputOptions output;
};

inline int cmd_similarity(const SimilarityConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_file(cfg.lexicon, "lexicon");
    require_file(cfg.left, "left embeddings");
    require_file(cfg.right, "right embeddings");
    if (cfg.ttest_against) require_file(*cfg.ttest_against, "t-test report");

    auto lexicon = load_lexicon(cfg.lexicon);
    auto left = load_embeddings(cfg.left, lexicon);
    auto right = load_embeddings(cfg.right, lexicon);
    auto pair = pair_sets(left, right, lexicon);
    auto report = aggregate_similarity(pair, cfg.distance, cfg.correlation);
    report.settings.ttest_variant = cfg.ttest_variant;

    auto json = report_to_json(report);
    std::optional<stats::TTestResult> ttest;
    if (cfg.ttest_against) {
      auto other = load_report(*cfg.ttest_against);
      ttest = stats::independent_t_test(report.valid_values(), other.valid_values(), cfg.ttest_variant);
      json["ttest"] = ttest_to_json(*ttest);
      json["ttest"]["against"] = cfg.ttest_against->filename().string();
    }

    if (cfg.output.wants("json")) io::write_text_file(cfg.output.out_dir / "similarity_report.json", json.dump(2) + "\n");
    if (cfg.output.wants("csv")) io::write_text_file(cfg.output.out_dir / "similarity_report.csv", report_to_csv(report));

    out << left.model_id() << "/" << left.language() << " vs " << right.model_id() << "/" << right.language() << " ("
        << to_string(cfg.distance) << ", " << to_string(cfg.correlation) << "): mean_r "
        << io::format_fixed(report.mean_r, 3) << " (" << io::format_fixed(report.std_r, 2) << "), n_valid "
        << report.n_valid << "/" << report.per_lemma.size() << '\n';
    if (ttest)
      out << stats::to_string(ttest->variant) << " t-test: t " << io::format_fixed(ttest->t_statistic, 4) << ", dof "
          << io::format_fixed(ttest->dof, 2) << ", p " << io::format_number(ttest->p_value)
          << (ttest->significant_05 ? " (significant at 0.05)" : " (not significant at 0.05)") << '\n';
  });
}

// --------------------------------------------------------------------------
// project
// --------------------------------------------------------------------------

struct ProjectConfig {
  std::optional<fs::path> lexicon;
  std::vector<fs::path> embeddings;
  std::optional<fs::path> anchors;  // defaults to the Russell five-nearest lists
  std::optional<std::vector<std::string>> labels;  // absent: every lemma of each set
  bool merge_anchors = false;
  OutputOptions output;
};

struct ProjectedPoint {
  std::string label;
  LanguageCode language;
  std::string model_id;
  PlanePoint point;
};

inline int cmd_project(const ProjectConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (cfg.embeddings.empty()) throw Error(ErrorCode::InvalidConfig, "at least one embedding file is required");
    std::optional<EmotionLexicon> lexicon;
    if (cfg.lexicon) {
      require_file(*cfg.lexicon, "lexicon");
      lexicon = load_lexicon(*cfg.lexicon);
    }
    AnchorLexicon anchor_lexicon = AnchorLexicon::russell_defaults();
    if (cfg.anchors) {
      require_file(*cfg.anchors, "anchor lexicon");
      anchor_lexicon = load_anchor_lexicon(*cfg.anchors);
    }

    std::vector<EmbeddingSet> sets;
    for (const auto& p : cfg.embeddings) {
      require_file(p, "embeddings");
      auto in = io::open_input(p);
      sets.push_back(parse_embeddings(in, lexicon ? &*lexicon : nullptr));
    }

    std::vector<AxisAnchors> anchors;
    for (const auto& s : sets) anchors.push_back(build_anchors(s, anchor_lexicon));
    if (cfg.merge_anchors) {
      auto merged = merge_anchors(anchors);
      anchors.assign(sets.size(), merged);
    }

    nlohmann::json planes = nlohmann::json::array();
    std::vector<ProjectedPoint> points;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const auto& set = sets[i];
      std::vector<LabeledVector> items;
      const auto& labels = cfg.labels ? *cfg.labels : set.lemmas();
      for (const auto& l : labels) {
        auto v = set.at(l);
        items.push_back({l, Vector(v.begin(), v.end())});
      }
      if (items.empty()) continue;
      PlaneProjection plane(anchors[i]);
      planes.push_back({{"model_id", set.model_id()},
                        {"language", set.language()},
                        {"cos_theta", plane.cos_theta()},
                        {"anchor_languages", anchors[i].source.languages},
                        {"contextualization", set.provenance().value("contextualization", "unspecified")}});
      for (const auto& lp : project_batch(anchors[i], items))
        points.push_back({lp.label, set.language(), set.model_id(), lp.point});
    }

    nlohmann::json settings = {{"anchors", anchor_lexicon_to_json(anchor_lexicon)},
                               {"merge_anchors", cfg.merge_anchors},
                               {"axis_scaling", "scale-then-orthogonalize"},
                               {"axis_norm", "euclidean"},
                               {"planes", planes}};

    if (cfg.output.wants("csv")) {
      std::string csv = "# settings: " + settings.dump() + "\n" + "label,language,valence,arousal\n";
      for (const auto& p : points)
        csv += io::csv_line({p.label, p.language, io::format_number(p.point.valence), io::format_number(p.point.arousal)});
      io::write_text_file(cfg.output.out_dir / "plane.csv", csv);
    }
    if (cfg.output.wants("json")) {
      nlohmann::json j = {{"settings", settings}, {"points", nlohmann::json::array()}};
      for (const auto& p : points)
        j["points"].push_back({{"label", p.label}, {"language", p.language}, {"model_id", p.model_id},
                               {"valence", p.point.valence}, {"arousal", p.point.arousal}});
      io::write_text_file(cfg.output.out_dir / "plane.json", j.dump(2) + "\n");
    }
    if (cfg.output.wants("svg")) {
      std::vector<svg::ScatterPoint> sp;
      for (const auto& p : points) sp.push_back({p.label, p.language, p.point.valence, p.point.arousal});
      io::write_text_file(cfg.output.out_dir / "plane.svg",
                          svg::plane_scatter(sp, "Valence-Arousal plane", settings.dump()));
    }

    for (const auto& p : points)
      out << p.language << "\t" << p.label << "\t" << io::format_fixed(p.point.valence, 4) << "\t"
          << io::format_fixed(p.point.arousal, 4) << '\n';
    out << points.size() << " point(s) projected" << (cfg.merge_anchors ? " on merged multilingual axes" : "") << '\n';
  });
}

// --------------------------------------------------------------------------
// logprob
// --------------------------------------------------------------------------

struct LogprobConfig {
  fs::path records;
  std::optional<fs::path> word_classes;
  Expectation expectation{"en", "ja"};
  ScoreMode score_mode = ScoreMode::sum;
  OutputOptions output;
};

inline int cmd_logprob(const LogprobConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_file(cfg.records, "logprob records");
    WordClassMap classes = WordClassMap::defaults();
    if (cfg.word_classes) {
      require_file(*cfg.word_classes, "word classes");
      classes = load_word_classes(*cfg.word_classes);
    }
    auto records = load_logprob_records(cfg.records, classes);
    auto comparisons = compare_all(records, classes, cfg.score_mode);
    auto report = evaluate_hypotheses(comparisons, cfg.expectation, classes);

    nlohmann::json settings = {{"score", to_string(cfg.score_mode)},
                               {"expectation", {{"pride", cfg.expectation.pride}, {"shame", cfg.expectation.shame}}},
                               {"word_classes", {{"words", classes.words()}}}};
    if (cfg.output.wants("csv"))
      io::write_text_file(cfg.output.out_dir / "logprob_cells.csv", comparisons_to_csv(comparisons, classes, settings));
    if (cfg.output.wants("json"))
      io::write_text_file(cfg.output.out_dir / "hypothesis.json", hypothesis_to_json(report, settings).dump(2) + "\n");

    out << comparisons_to_text(comparisons);
    out << "pride supported in " << report.n_pride_supported << "/" << report.scenarios.size()
        << " scenarios, shame supported in " << report.n_shame_supported << "/" << report.scenarios.size() << '\n';
    out << "verdict: " << report.verdict() << '\n';
  });
}

// --------------------------------------------------------------------------
// study
// --------------------------------------------------------------------------

struct StudyConfig {
  fs::path annotations;
  OutputOptions output;
};

inline std::string file_safe(std::string s) {
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  return s;
}

inline int cmd_study(const StudyConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_file(cfg.annotations, "annotations");
    auto records = load_annotations(cfg.annotations);
    auto awareness = mean_awareness(records);
    auto agreement = annotator_agreement(records, /*allow_single_annotator=*/true);
    const nlohmann::json settings = {{"annotations", cfg.annotations.filename().string()},
                                     {"score_scale", {kMinScore, kMaxScore}},
                                     {"agreement", "pearson"},
                                     {"single_annotator", "allowed, agreement undefined"}};

    if (cfg.output.wants("csv")) {
      io::write_text_file(cfg.output.out_dir / "awareness.csv", awareness_to_csv(awareness, settings));
      io::write_text_file(cfg.output.out_dir / "agreement.csv", agreement_to_csv(agreement, settings));
    }
    if (cfg.output.wants("json"))
      io::write_text_file(cfg.output.out_dir / "study.json",
                          study_to_json(awareness, agreement, settings).dump(2) + "\n");
    if (cfg.output.wants("svg")) {
      std::map<std::string, std::vector<svg::Bar>> per_model;
      for (const auto& [k, c] : awareness)
        per_model[k.model_id].push_back(
            {k.context_mode == ContextMode::english ? "English prompt" : "Native prompt", k.language, c.mean});
      for (const auto& [model, bars] : per_model)
        io::write_text_file(cfg.output.out_dir / ("awareness_" + file_safe(model) + ".svg"),
                            svg::grouped_bars(bars, "Cultural awareness of " + model, 7.0, settings.dump()));
    }

    out << "model\tcontext\tlanguage\tmean\tcount\n";
    for (const auto& [k, c] : awareness)
      out << k.model_id << '\t' << to_string(k.context_mode) << '\t' << k.language << '\t' << io::format_fixed(c.mean, 2)
          << '\t' << c.count << '\n';
    out << "language\tmodel\tcontext\tagreement\n";
    for (const auto& [k, c] : agreement) {
      out << k.language << '\t' << k.model_id << '\t' << to_string(k.context_mode) << '\t'
          << (c.r ? io::format_fixed(*c.r, 3) : std::string("undefined")) << '\n';
      if (c.annotator_b.empty())
        err << "warning: group (" << k.language << ", " << k.model_id << ", " << to_string(k.context_mode)
            << ") has a single annotator; agreement undefined\n";
    }
  });
}

// --------------------------------------------------------------------------
// validate
// --------------------------------------------------------------------------

struct ValidateConfig {
  std::optional<fs::path> lexicon;
  std::vector<fs::path> embeddings;
  std::optional<fs::path> anchors;
  std::optional<fs::path> records;
  std::optional<fs::path> word_classes;
  std::optional<fs::path> annotations;
};

inline int cmd_validate(const ValidateConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::optional<EmotionLexicon> lexicon;
    bool anything = false;
    if (cfg.lexicon) {
      require_file(*cfg.lexicon, "lexicon");
      lexicon = load_lexicon(*cfg.lexicon);
      out << cfg.lexicon->string() << ": lexicon, " << lexicon->size() << " lemmas, " << lexicon->languages().size()
          << " language(s)";
      for (const auto& lang : lexicon->languages()) out << ", " << lang << " " << lexicon->unique_forms(lang) << " unique";
      out << '\n';
      anything = true;
    }
    for (const auto& p : cfg.embeddings) {
      require_file(p, "embeddings");
      auto in = io::open_input(p);
      auto set = parse_embeddings(in, lexicon ? &*lexicon : nullptr);
      out << p.string() << ": embeddings " << set.model_id() << "/" << set.language() << ", " << set.size()
          << " vectors, dim " << set.dim() << '\n';
      anything = true;
    }
    if (cfg.anchors) {
      require_file(*cfg.anchors, "anchor lexicon");
      auto a = load_anchor_lexicon(*cfg.anchors);
      out << cfg.anchors->string() << ": anchor lexicon '" << a.version << "'\n";
      anything = true;
    }
    WordClassMap classes = WordClassMap::defaults();
    if (cfg.word_classes) {
      require_file(*cfg.word_classes, "word classes");
      classes = load_word_classes(*cfg.word_classes);
      anything = true;
    }
    if (cfg.records) {
      require_file(*cfg.records, "logprob records");
      auto recs = load_logprob_records(*cfg.records, classes);
      out << cfg.records->string() << ": " << recs.size() << " logprob records\n";
      anything = true;
    }
    if (cfg.annotations) {
      require_file(*cfg.annotations, "annotations");
      auto recs = load_annotations(*cfg.annotations);
      out << cfg.annotations->string() << ": " << recs.size() << " annotation records\n";
      anything = true;
    }
    if (!anything) throw Error(ErrorCode::InvalidConfig, "nothing to validate");
    out << "ok\n";
  });
}

}  // namespace emocult::cli
