// emocult: emotion-geometry and cultural-awareness analyses from the command line.
//
//   emocult similarity --lexicon LEX --left A.jsonl --right B.jsonl [--distance cosine] [--correlation spearman]
//   emocult project    --embeddings EN.jsonl JA.jsonl [--anchors ANCHORS.json] [--labels pride,shame] [--merge-anchors]
//   emocult logprob    --records RECORDS.jsonl [--word-classes MAP.json] [--expect pride=en,shame=ja]
//   emocult study      --annotations ANNOTATIONS.csv
//   emocult validate   [--lexicon ...] [--embeddings ...] [--records ...] [--annotations ...]
//
// Flags may also come from a TOML file given with --config; flags on the
// command line take precedence.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emocult/cli.hpp"

namespace {

using emocult::cli::ExitCode;

struct SharedFlags {
  std::string lexicon;
  std::string out_dir = ".";
  std::string formats = "csv,json,svg";
};

void add_shared(CLI::App* cmd, SharedFlags& flags, bool lexicon) {
  if (lexicon) cmd->add_option("--lexicon", flags.lexicon, "Emotion lexicon (JSON Lines)");
  cmd->add_option("--out", flags.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--format", flags.formats, "Comma-separated output formats: csv,json,svg")->capture_default_str();
}

emocult::cli::OutputOptions output_of(const SharedFlags& flags) {
  return {flags.out_dir, emocult::cli::parse_formats(flags.formats)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emotion embedding geometry and cultural-awareness analyses"};
  app.set_config("--config", "", "TOML config file; command-line flags override it");
  app.require_subcommand(1);

  // similarity
  SharedFlags sim_flags;
  std::string left, right, distance = "euclidean", correlation = "pearson", ttest_variant = "welch", ttest_against;
  auto* sim = app.add_subcommand("similarity", "Distance-based similarity of two embedding sets");
  add_shared(sim, sim_flags, true);
  sim->add_option("--left", left, "Left embedding file")->required();
  sim->add_option("--right", right, "Right embedding file")->required();
  sim->add_option("--distance", distance, "euclidean | cosine")
      ->check(CLI::IsMember({"euclidean", "cosine"}))
      ->capture_default_str();
  sim->add_option("--correlation", correlation, "pearson | spearman")
      ->check(CLI::IsMember({"pearson", "spearman"}))
      ->capture_default_str();
  sim->add_option("--ttest", ttest_variant, "welch | student")
      ->check(CLI::IsMember({"welch", "student"}))
      ->capture_default_str();
  sim->add_option("--ttest-against", ttest_against, "Another similarity_report.json to test against");

  // project
  SharedFlags proj_flags;
  std::vector<std::string> embeddings;
  std::string anchors, labels;
  bool merge = false;
  auto* proj = app.add_subcommand("project", "Project emotion embeddings onto the Valence-Arousal plane");
  add_shared(proj, proj_flags, true);
  proj->add_option("--embeddings", embeddings, "Embedding file(s), one per language")->required();
  proj->add_option("--anchors", anchors, "Anchor lexicon JSON (default: Russell five-nearest lists)");
  auto* labels_opt = proj->add_option("--labels", labels, "Comma-separated lemmas to project (default: all)");
  proj->add_flag("--merge-anchors", merge, "Average anchors across the given languages");

  // logprob
  SharedFlags lp_flags;
  std::string records, word_classes, expect = "pride=en,shame=ja", score_mode = "sum";
  auto* lp = app.add_subcommand("logprob", "Compare summed feeling log-probabilities across languages");
  add_shared(lp, lp_flags, false);
  lp->add_option("--records", records, "Logprob records (JSON Lines)")->required();
  lp->add_option("--word-classes", word_classes, "Word-class map JSON");
  lp->add_option("--expect", expect, "Expected languages, e.g. pride=en,shame=ja")->capture_default_str();
  lp->add_option("--score", score_mode, "sum | mean (per-token)")
      ->check(CLI::IsMember({"sum", "mean"}))
      ->capture_default_str();

  // study
  SharedFlags st_flags;
  std::string annotations;
  auto* st = app.add_subcommand("study", "Aggregate cultural-awareness annotations");
  add_shared(st, st_flags, false);
  st->add_option("--annotations", annotations, "Annotation CSV")->required();

  // validate
  std::string v_lexicon, v_anchors, v_records, v_word_classes, v_annotations;
  std::vector<std::string> v_embeddings;
  auto* val = app.add_subcommand("validate", "Validate input files without running an analysis");
  val->add_option("--lexicon", v_lexicon, "Emotion lexicon");
  val->add_option("--embeddings", v_embeddings, "Embedding file(s)");
  val->add_option("--anchors", v_anchors, "Anchor lexicon");
  val->add_option("--records", v_records, "Logprob records");
  val->add_option("--word-classes", v_word_classes, "Word-class map");
  val->add_option("--annotations", v_annotations, "Annotation CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? ExitCode::kSuccess : ExitCode::kValidationError;
  }

  auto opt_path = [](const std::string& s) -> std::optional<std::filesystem::path> {
    if (s.empty()) return std::nullopt;
    return std::filesystem::path(s);
  };

  try {
    if (*sim) {
      emocult::cli::SimilarityConfig cfg;
      cfg.lexicon = sim_flags.lexicon;
      cfg.left = left;
      cfg.right = right;
      cfg.distance = emocult::parse_distance_kind(distance);
      cfg.correlation = emocult::parse_correlation_kind(correlation);
      cfg.ttest_variant = emocult::stats::parse_ttest_variant(ttest_variant);
      cfg.ttest_against = opt_path(ttest_against);
      cfg.output = output_of(sim_flags);
      return emocult::cli::cmd_similarity(cfg, std::cout, std::cerr);
    }
    if (*proj) {
      emocult::cli::ProjectConfig cfg;
      cfg.lexicon = opt_path(proj_flags.lexicon);
      for (const auto& e : embeddings) cfg.embeddings.emplace_back(e);
      cfg.anchors = opt_path(anchors);
      if (labels_opt->count() > 0) {
        std::vector<std::string> list;
        for (const auto& l : emocult::io::split(labels, ','))
          if (auto t = emocult::io::trim(l); !t.empty()) list.emplace_back(t);
        cfg.labels = std::move(list);
      }
      cfg.merge_anchors = merge;
      cfg.output = output_of(proj_flags);
      return emocult::cli::cmd_project(cfg, std::cout, std::cerr);
    }
    if (*lp) {
      emocult::cli::LogprobConfig cfg;
      cfg.records = records;
      cfg.word_classes = opt_path(word_classes);
      cfg.expectation = emocult::parse_expectation(expect);
      cfg.score_mode = score_mode == "mean" ? emocult::ScoreMode::mean : emocult::ScoreMode::sum;
      cfg.output = output_of(lp_flags);
      return emocult::cli::cmd_logprob(cfg, std::cout, std::cerr);
    }
    if (*st) {
      emocult::cli::StudyConfig cfg;
      cfg.annotations = annotations;
      cfg.output = output_of(st_flags);
      return emocult::cli::cmd_study(cfg, std::cout, std::cerr);
    }
    if (*val) {
      emocult::cli::ValidateConfig cfg;
      cfg.lexicon = opt_path(v_lexicon);
      for (const auto& e : v_embeddings) cfg.embeddings.emplace_back(e);
      cfg.anchors = opt_path(v_anchors);
      cfg.records = opt_path(v_records);
      cfg.word_classes = opt_path(v_word_classes);
      cfg.annotations = opt_path(v_annotations);
      return emocult::cli::cmd_validate(cfg, std::cout, std::cerr);
    }
  } catch (const emocult::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ExitCode::kValidationError;
  }
  return ExitCode::kValidationError;
}
