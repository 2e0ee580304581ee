// cli.cc

// Copyright 2026  The dsel Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "dsel/cli.h"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "dsel/cer_selection.h"
#include "dsel/manifest.h"
#include "dsel/ner_selection.h"
#include "dsel/parallel.h"
#include "dsel/report.h"
#include "dsel/sampler.h"
#include "dsel/wer_classifier.h"

namespace dsel {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct NormFlags {
  bool no_lowercase = false;
  bool keep_punctuation = false;
  bool no_collapse = false;
  bool cer_spaces = false;

  void Register(CLI::App *app) {
    app->add_flag("--no-lowercase", no_lowercase, "Keep letter case");
    app->add_flag("--keep-punctuation", keep_punctuation,
                  "Do not strip punctuation");
    app->add_flag("--no-collapse-whitespace", no_collapse,
                  "Keep internal whitespace runs");
    app->add_flag("--cer-include-spaces", cer_spaces,
                  "Count spaces as characters in CER");
  }
  NormalizationConfig Config() const {
    NormalizationConfig c;
    c.lowercase = !no_lowercase;
    c.strip_punctuation = !keep_punctuation;
    c.collapse_whitespace = !no_collapse;
    c.cer_include_spaces = cer_spaces;
    return c;
  }
};

ordered_json NormJson(const NormalizationConfig &c) {
  return {{"lowercase", c.lowercase},
          {"strip_punctuation", c.strip_punctuation},
          {"collapse_whitespace", c.collapse_whitespace},
          {"cer_include_spaces", c.cer_include_spaces}};
}

struct CerFlags {
  std::optional<double> tau_percent;
  std::optional<double> tau_fraction;
  std::vector<std::string> systems{"whisper", "zipformer", "parakeet"};

  void Register(CLI::App *app) {
    auto *pct = app->add_option("--tau", tau_percent,
                                "Average-CER threshold in percent (default 5)");
    auto *frac = app->add_option("--tau-fraction", tau_fraction,
                                 "Average-CER threshold as a fraction");
    pct->excludes(frac);
    app->add_option("--systems", systems,
                    "Required hypothesis systems (default whisper,zipformer,"
                    "parakeet)")
        ->delimiter(',');
  }
  double Tau() const {
    if (tau_percent) return *tau_percent / 100.0;
    if (tau_fraction) return *tau_fraction;
    return 0.05;
  }
};

struct CommonFlags {
  std::string input;
  std::string output_dir;
  unsigned threads = DefaultThreads();
  bool record_timing = false;
};

void AddInput(CLI::App *app, CommonFlags &f) {
  app->add_option("-i,--input", f.input, "Input manifest (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
}

void AddThreads(CLI::App *app, CommonFlags &f) {
  app->add_option("--threads", f.threads,
                  "Worker threads (default $DSEL_THREADS or 1)")
      ->check(CLI::PositiveNumber);
}

RunReport BaseReport(const std::string &command, const CommonFlags &f,
                     const SegmentPool &pool) {
  RunReport r;
  r.command = command;
  r.manifest_digest = FileDigest(f.input);
  r.manifest_segments = pool.size();
  r.manifest_duration_s = pool.total_duration_s();
  r.config["input"] = f.input;
  return r;
}

void EnsureDir(const std::string &dir) {
  if (dir.empty()) throw Error("an output directory is required");
  fs::create_directories(dir);
}

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

// score-cer -------------------------------------------------------------

struct ScoreCerCmd {
  CommonFlags common;
  CerFlags cer;
  NormFlags norm;
  double bin_width = 0.05;

  void Register(CLI::App *app) {
    AddInput(app, common);
    app->add_option("-o,--output-dir", common.output_dir, "Output directory")
        ->required();
    cer.Register(app);
    norm.Register(app);
    app->add_option("--bin-width", bin_width, "Histogram bin width (fraction)")
        ->check(CLI::Range(1e-6, 1.0));
    AddThreads(app, common);
    app->add_flag("--record-timing", common.record_timing,
                  "Add wall-clock time to the report");
  }

  int Run(std::ostream &out) {
    auto t0 = Clock::now();
    CerFilterConfig cfg;
    cfg.tau = cer.Tau();
    cfg.required_systems = cer.systems;
    cfg.norm = norm.Config();
    cfg.Validate();

    SegmentPool pool = ReadManifest(common.input, common.threads);
    CerScoring scoring = ScorePool(pool, cfg, common.threads);
    CerHistogram hist = CerHistogramOf(scoring.scores, pool, bin_width);
    SegmentPool retained = RetainLowCer(scoring.scores, pool, cfg);

    EnsureDir(common.output_dir);
    WriteCerScores(scoring.scores, fs::path(common.output_dir) / "cer_scores.jsonl");

    RunReport r = BaseReport("score-cer", common, pool);
    r.config["tau"] = cfg.tau;
    r.config["systems"] = cfg.required_systems;
    r.config["normalization"] = NormJson(cfg.norm);
    r.config["bin_width"] = bin_width;
    r.config["scored_count"] = scoring.scores.size();
    r.config["skipped_count"] = scoring.skipped.size();
    r.config["retained_count"] = retained.size();
    r.config["retained_s"] = retained.total_duration_s();
    r.cer_histogram = hist;
    if (common.record_timing) r.wall_clock_s = Seconds(t0);
    WriteRunReport(r, common.output_dir);
    out << "scored " << scoring.scores.size() << " segments, skipped "
        << scoring.skipped.size() << ", retained " << retained.size()
        << " below tau=" << cfg.tau << "\n";
    return 0;
  }
};

// select ----------------------------------------------------------------

struct SelectCmd {
  CommonFlags common;
  CerFlags cer;
  NormFlags norm;
  std::string strategy;
  double budget_hours = 100.0;
  std::uint64_t seed = Rng::kDefaultSeed;
  std::string model_path;
  bool rank_lowest = false;
  std::string confidence_agg = "max";

  void Register(CLI::App *app) {
    AddInput(app, common);
    app->add_option("-o,--output-dir", common.output_dir, "Output directory")
        ->required();
    app->add_option("-s,--strategy", strategy,
                    "random | wer-clf | ner-random | ner-top-conf | "
                    "ner-class-random | ner-class-top-conf | cer")
        ->required();
    app->add_option("--budget-hours", budget_hours, "Budget N in hours")
        ->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "Seed for all random draws (default 42)");
    app->add_option("--model", model_path, "WER classifier model (wer-clf)");
    app->add_flag("--rank-lowest", rank_lowest,
                  "cer: take the lowest-CER retained segments instead of a "
                  "random sample");
    app->add_option("--confidence-agg", confidence_agg,
                    "Segment NER confidence aggregation: max or mean")
        ->check(CLI::IsMember({"max", "mean"}));
    cer.Register(app);
    norm.Register(app);
    AddThreads(app, common);
    app->add_flag("--record-timing", common.record_timing,
                  "Add wall-clock time to the report");
  }

  int Run(std::ostream &out) {
    auto t0 = Clock::now();
    // Validate everything before touching the filesystem.
    Strategy strat = ParseStrategy(strategy);
    Budget budget = Budget::Hours(budget_hours);
    if (strat == Strategy::kWerClf && model_path.empty())
      throw Error("strategy wer-clf requires --model");
    CerFilterConfig cfg;
    cfg.tau = cer.Tau();
    cfg.required_systems = cer.systems;
    cfg.norm = norm.Config();
    cfg.rank_lowest = rank_lowest;
    if (strat == Strategy::kCer) cfg.Validate();
    ConfidenceAggregation agg = confidence_agg == "mean"
                                    ? ConfidenceAggregation::kMean
                                    : ConfidenceAggregation::kMax;

    SegmentPool pool = ReadManifest(common.input, common.threads);
    RunReport r = BaseReport("select", common, pool);
    r.config["strategy"] = StrategyName(strat);
    r.config["budget_hours"] = budget_hours;
    r.config["budget_s"] = budget.seconds();
    r.config["seed"] = seed;

    Rng rng(seed);
    SelectionResult sel;
    switch (strat) {
      case Strategy::kRandom:
        sel = RandomSample(pool, budget, rng);
        break;
      case Strategy::kWerClf: {
        LinearSvmModel model = LoadModel(model_path);
        r.config["model"] = model_path;
        r.config["model_digest"] = FileDigest(model_path);
        sel = SelectLowWer(pool, model, budget, rng);
        break;
      }
      case Strategy::kNerRandom:
        sel = SelectNerRandom(pool, budget, rng);
        break;
      case Strategy::kNerTopConf:
        sel = SelectNerTopConfidence(pool, budget, agg);
        break;
      case Strategy::kNerClassRandom:
        sel = SelectNerClassBalancedRandom(pool, budget, rng, agg);
        break;
      case Strategy::kNerClassTopConf:
        sel = SelectNerClassBalancedTopConfidence(pool, budget, agg);
        break;
      case Strategy::kCer:
        r.config["tau"] = cfg.tau;
        r.config["systems"] = cfg.required_systems;
        r.config["normalization"] = NormJson(cfg.norm);
        r.config["rank_lowest"] = cfg.rank_lowest;
        sel = SelectCer(pool, cfg, budget, rng, common.threads);
        break;
      case Strategy::kTopN:
        throw Error("top-n is not a selectable strategy");
    }
    sel.strategy = strat;
    sel.seed = seed;

    bool ner = strat == Strategy::kNerRandom || strat == Strategy::kNerTopConf ||
               strat == Strategy::kNerClassRandom ||
               strat == Strategy::kNerClassTopConf;
    if (ner) {
      r.config["confidence_agg"] = confidence_agg;
      SegmentPool entity_pool = FilterEntitySegments(pool);
      if (!entity_pool.empty()) {
        EntityClassStats total = ClassStatsOf(entity_pool, agg);
        r.entity_stats = total;
        r.distribution = RenderDistributionReport(
            pool, total, {{std::string(StrategyName(strat)), sel}}, agg);
      }
    }
    if (strat == Strategy::kCer) {
      CerScoring scoring = ScorePool(pool, cfg, common.threads);
      r.cer_histogram = CerHistogramOf(scoring.scores, pool, 0.05);
    }
    r.selection = sel;

    SegmentPool subset = pool.Subset(sel.selected_ids);
    EnsureDir(common.output_dir);
    WriteManifest(subset, fs::path(common.output_dir) / "manifest.jsonl");
    if (common.record_timing) r.wall_clock_s = Seconds(t0);
    WriteRunReport(r, common.output_dir);
    out << StrategyName(strat) << ": selected " << sel.selected_ids.size()
        << " segments, " << sel.realized_duration_s / 3600.0 << " h of "
        << budget_hours << " h budget\n";
    for (const auto &w : sel.warnings) out << "warning: " << w << "\n";
    return 0;
  }
};

// train-wer / eval-wer ---------------------------------------------------

struct TrainWerCmd {
  CommonFlags common;
  std::string model_path;
  SvmTrainOptions opts;

  void Register(CLI::App *app) {
    AddInput(app, common);
    app->add_option("--model", model_path, "Output model path (JSON)")
        ->required();
    app->add_option("-o,--output-dir", common.output_dir,
                    "Optional directory for a training-set report");
    app->add_option("--lambda", opts.lambda, "L2 regularization strength")
        ->check(CLI::PositiveNumber);
    app->add_option("--epochs", opts.epochs, "Passes over the training set")
        ->check(CLI::PositiveNumber);
    app->add_option("--seed", opts.seed, "Shuffle seed (default 42)");
    app->add_option("--low-wer-weight", opts.low_wer_weight,
                    "Hinge-loss weight of the low-WER class")
        ->check(CLI::PositiveNumber);
    app->add_option("--high-wer-weight", opts.high_wer_weight,
                    "Hinge-loss weight of the high-WER class")
        ->check(CLI::PositiveNumber);
  }

  int Run(std::ostream &out) {
    SegmentPool pool = ReadManifest(common.input);
    LinearSvmModel model = TrainSvm(pool, opts);
    SaveModel(model, model_path);
    ClassificationReport rep = Evaluate(model, pool);
    if (!common.output_dir.empty()) {
      RunReport r = BaseReport("train-wer", common, pool);
      r.config["model"] = model_path;
      r.config["lambda"] = opts.lambda;
      r.config["epochs"] = opts.epochs;
      r.config["seed"] = opts.seed;
      r.config["low_wer_weight"] = opts.low_wer_weight;
      r.config["high_wer_weight"] = opts.high_wer_weight;
      r.classification = rep;
      EnsureDir(common.output_dir);
      WriteRunReport(r, common.output_dir);
    }
    out << "trained on " << pool.size() << " segments, training accuracy "
        << rep.accuracy << "\n";
    return 0;
  }
};

struct EvalWerCmd {
  CommonFlags common;
  std::string model_path;

  void Register(CLI::App *app) {
    AddInput(app, common);
    app->add_option("--model", model_path, "Model path (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("-o,--output-dir", common.output_dir, "Output directory")
        ->required();
  }

  int Run(std::ostream &out) {
    SegmentPool pool = ReadManifest(common.input);
    LinearSvmModel model = LoadModel(model_path);
    ClassificationReport rep = Evaluate(model, pool);
    RunReport r = BaseReport("eval-wer", common, pool);
    r.config["model"] = model_path;
    r.config["model_digest"] = FileDigest(model_path);
    r.classification = rep;
    EnsureDir(common.output_dir);
    WriteRunReport(r, common.output_dir);
    out << "accuracy " << rep.accuracy << " on " << pool.size()
        << " segments\n";
    return 0;
  }
};

// stats -----------------------------------------------------------------

struct StatsCmd {
  CommonFlags common;
  CerFlags cer;
  NormFlags norm;
  double bin_width = 0.05;
  std::string confidence_agg = "max";

  void Register(CLI::App *app) {
    AddInput(app, common);
    app->add_option("-o,--output-dir", common.output_dir,
                    "Optional directory for report.json/report.txt");
    cer.Register(app);
    norm.Register(app);
    app->add_option("--bin-width", bin_width, "Histogram bin width (fraction)")
        ->check(CLI::Range(1e-6, 1.0));
    app->add_option("--confidence-agg", confidence_agg,
                    "Segment NER confidence aggregation: max or mean")
        ->check(CLI::IsMember({"max", "mean"}));
    AddThreads(app, common);
  }

  int Run(std::ostream &out) {
    CerFilterConfig cfg;
    cfg.tau = cer.Tau();
    cfg.required_systems = cer.systems;
    cfg.norm = norm.Config();
    cfg.Validate();
    ConfidenceAggregation agg = confidence_agg == "mean"
                                    ? ConfidenceAggregation::kMean
                                    : ConfidenceAggregation::kMax;

    SegmentPool pool = ReadManifest(common.input, common.threads);
    RunReport r = BaseReport("stats", common, pool);
    r.config["systems"] = cfg.required_systems;
    r.config["bin_width"] = bin_width;
    r.config["confidence_agg"] = confidence_agg;

    SegmentPool entity_pool = FilterEntitySegments(pool);
    if (!entity_pool.empty()) {
      EntityClassStats total = ClassStatsOf(entity_pool, agg);
      r.entity_stats = total;
      SelectionResult all;
      for (const auto &s : pool) all.selected_ids.push_back(s.id);
      r.distribution =
          RenderDistributionReport(pool, total, {{"total", all}}, agg);
    }
    bool scoreable = std::any_of(pool.begin(), pool.end(), [&](const Segment &s) {
      return std::all_of(cfg.required_systems.begin(), cfg.required_systems.end(),
                         [&](const std::string &sys) {
                           return s.hypotheses.count(sys) > 0;
                         });
    });
    if (scoreable) {
      CerScoring scoring = ScorePool(pool, cfg, common.threads);
      r.cer_histogram = CerHistogramOf(scoring.scores, pool, bin_width);
    }

    if (!common.output_dir.empty()) {
      EnsureDir(common.output_dir);
      WriteRunReport(r, common.output_dir);
    }
    out << RenderTextTables(r);
    return 0;
  }
};

}  // namespace

int RunCli(const std::vector<std::string> &args, std::ostream &out,
           std::ostream &err) {
  CLI::App app{"dsel: select fine-tuning subsets from pseudo-labelled speech "
               "manifests"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolkitVersion));

  ScoreCerCmd score;
  SelectCmd select;
  TrainWerCmd train;
  EvalWerCmd eval;
  StatsCmd stats;
  auto *score_app =
      app.add_subcommand("score-cer", "Average pairwise CER per segment");
  auto *select_app = app.add_subcommand("select", "Run a selection strategy");
  auto *train_app =
      app.add_subcommand("train-wer", "Train the low/high-WER classifier");
  auto *eval_app =
      app.add_subcommand("eval-wer", "Evaluate a WER classifier");
  auto *stats_app =
      app.add_subcommand("stats", "Entity and CER statistics of a manifest");
  score.Register(score_app);
  select.Register(select_app);
  train.Register(train_app);
  eval.Register(eval_app);
  stats.Register(stats_app);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    return app.exit(e, out, err);
  }

  try {
    if (score_app->parsed()) return score.Run(out);
    if (select_app->parsed()) return select.Run(out);
    if (train_app->parsed()) return train.Run(out);
    if (eval_app->parsed()) return eval.Run(out);
    if (stats_app->parsed()) return stats.Run(out);
  } catch (const std::exception &e) {
    err << "dsel: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace dsel
