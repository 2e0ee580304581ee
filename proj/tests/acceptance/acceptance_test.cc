// acceptance/acceptance_test.cc

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

// Acceptance suite.  Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dsel/cer_selection.h"
#include "dsel/cli.h"
#include "dsel/manifest.h"
#include "dsel/ner_selection.h"
#include "dsel/parallel.h"
#include "dsel/report.h"
#include "dsel/sampler.h"
#include "dsel/textnorm.h"
#include "dsel/wer_classifier.h"
#include "support/synth.h"

namespace fs = std::filesystem;
using namespace dsel;

namespace {

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string Fmt(const char *fmt, ...) __attribute__((format(printf, 1, 2)));
std::string Fmt(const char *fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

std::string Slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the CLI, returning its exit code; stderr is echoed on failure.
int Cli(const std::vector<std::string> &args) {
  std::ostringstream out, err;
  int code = RunCli(args, out, err);
  if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
  return code;
}

double MaxDuration(const SegmentPool &pool) {
  double m = 0;
  for (const auto &s : pool) m = std::max(m, s.duration_s);
  return m;
}

// Plain memoized recursion over suffixes.
std::size_t OracleDistance(const std::vector<int> &a, const std::vector<int> &b) {
  std::vector<std::vector<long>> memo(a.size() + 1, std::vector<long>(b.size() + 1, -1));
  std::function<long(std::size_t, std::size_t)> d = [&](std::size_t i, std::size_t j) -> long {
    if (i == a.size()) return static_cast<long>(b.size() - j);
    if (j == b.size()) return static_cast<long>(a.size() - i);
    long &m = memo[i][j];
    if (m >= 0) return m;
    long best = d(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
    best = std::min(best, d(i + 1, j) + 1);
    best = std::min(best, d(i, j + 1) + 1);
    return m = best;
  };
  return static_cast<std::size_t>(d(0, 0));
}

// 1. ---------------------------------------------------------------------
Outcome EditDistanceOracle() {
  auto t0 = Clock::now();
  Rng rng(1001);
  std::size_t mismatches = 0;
  for (int k = 0; k < 10000; ++k) {
    std::vector<int> a(rng.Below(13)), b(rng.Below(13));
    for (auto &x : a) x = static_cast<int>(rng.Below(4));
    for (auto &x : b) x = static_cast<int>(rng.Below(4));
    if (Levenshtein(a, b) != OracleDistance(a, b)) ++mismatches;
  }
  double secs = Since(t0);
  return {mismatches == 0 && secs < 60.0,
          Fmt("10000 pairs, %zu mismatches, %.2f s", mismatches, secs)};
}

// 2. ---------------------------------------------------------------------
Outcome ThreeSystemAverage() {
  Rng rng(1002);
  const std::string alphabet = "abcd";
  auto word = [&] {
    std::string w(1 + rng.Below(6), 'a');
    for (auto &c : w) c = alphabet[rng.Below(alphabet.size())];
    return w;
  };
  auto sentence = [&] {
    std::string s;
    std::size_t n = rng.Below(8);
    for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + word();
    return s;
  };
  auto letters = [](const std::string &s) {
    std::vector<int> v;
    for (char c : s)
      if (c != ' ') v.push_back(c);
    return v;
  };
  auto oracle_cer = [&](const std::string &x, const std::string &y) {
    auto a = letters(x), b = letters(y);
    std::size_t den = std::max(a.size(), b.size());
    return den == 0 ? 0.0 : static_cast<double>(OracleDistance(a, b)) / den;
  };
  double worst = 0;
  std::size_t bad_count = 0;
  for (int k = 0; k < 2000; ++k) {
    std::map<std::string, std::string> h{
        {"whisper", sentence()}, {"zipformer", sentence()}, {"parakeet", sentence()}};
    CerAverage avg = CerAvgDetailed(h);
    if (avg.pairs.size() != 3) ++bad_count;
    double by_hand = (oracle_cer(h["whisper"], h["zipformer"]) +
                      oracle_cer(h["whisper"], h["parakeet"]) +
                      oracle_cer(h["zipformer"], h["parakeet"])) /
                     3.0;
    double from_pairs = (avg.pairs[0].cer + avg.pairs[1].cer + avg.pairs[2].cer) / 3.0;
    worst = std::max({worst, std::abs(avg.average - by_hand),
                      std::abs(avg.average - from_pairs)});
  }
  return {bad_count == 0 && worst <= 1e-12,
          Fmt("2000 segments, max |diff| %.3g, wrong pair counts %zu", worst, bad_count)};
}

// 3. ---------------------------------------------------------------------
Outcome PlantedRetention() {
  // Thresholds as exact ratios p/q.
  const std::vector<std::pair<std::size_t, std::size_t>> taus{{1, 100}, {1, 20}, {1, 5}};
  Rng rng(1003);
  std::vector<Segment> segs;
  std::vector<synth::PlantedCer> plants;
  std::size_t ties = 0;
  while (segs.size() < 10000) {
    synth::PlantedCer pc;
    pc.length = 40 + rng.Below(81);
    // Skew towards low CER so every threshold retains something.
    std::size_t cap = rng.Below(2) ? pc.length / 10 : pc.length / 3;
    pc.a = rng.Below(cap + 1);
    pc.b = rng.Below(cap + 1);
    // A plant exactly on a threshold would test float rounding, not the rule.
    bool tie = false;
    for (auto [p, q] : taus) tie = tie || pc.Numerator() * q == p * pc.Denominator();
    if (tie) {
      ++ties;
      continue;
    }
    segs.push_back(synth::MakeSegment(synth::SegId(segs.size()),
                                      synth::Uniform(rng, 1, 20),
                                      synth::PlantedHypotheses(pc, rng)));
    plants.push_back(pc);
  }
  SegmentPool pool(std::move(segs));
  CerFilterConfig cfg;
  CerScoring sc = ScorePool(pool, cfg, DefaultThreads());

  std::size_t wrong = 0;
  bool monotone = true;
  std::set<std::string> prev;
  std::string sizes;
  for (auto [p, q] : taus) {
    cfg.tau = static_cast<double>(p) / static_cast<double>(q);
    SegmentPool kept = RetainLowCer(sc.scores, pool, cfg);
    std::set<std::string> got;
    for (const auto &s : kept) got.insert(s.id);
    std::set<std::string> want;
    for (std::size_t i = 0; i < plants.size(); ++i)
      if (plants[i].Below(p, q)) want.insert(pool[i].id);
    if (got != want) {
      std::vector<std::string> diff;
      std::set_symmetric_difference(got.begin(), got.end(), want.begin(), want.end(),
                                    std::back_inserter(diff));
      wrong += diff.size();
    }
    monotone = monotone && std::includes(got.begin(), got.end(), prev.begin(), prev.end());
    sizes += Fmt("%s%g:%zu", sizes.empty() ? "" : " ", cfg.tau, got.size());
    prev = std::move(got);
  }
  return {wrong == 0 && monotone,
          Fmt("retained {%s}, %zu disagreements, monotone %s, %zu threshold ties redrawn",
              sizes.c_str(), wrong, monotone ? "yes" : "no", ties)};
}

// 4. ---------------------------------------------------------------------
Outcome BudgetSafety() {
  Rng rng(1004);
  std::size_t over = 0, loose = 0, instances = 0;
  double worst_gap = 0;
  for (int k = 0; k < 1000; ++k) {
    std::size_t n = 1 + rng.Below(300);
    double lo = synth::Uniform(rng, 0.1, 5), hi = lo + synth::Uniform(rng, 0, 40);
    std::vector<Segment> segs;
    for (std::size_t i = 0; i < n; ++i)
      segs.push_back(synth::MakeSegment(synth::SegId(i), synth::Uniform(rng, lo, hi),
                                        {{"whisper", "x"}}));
    SegmentPool pool(std::move(segs));
    double total = pool.total_duration_s();
    Budget budget = Budget::Seconds(total * synth::Uniform(rng, 0.01, 1.2));
    double max_seg = MaxDuration(pool);

    std::vector<double> scores(n);
    for (auto &s : scores) s = synth::Uniform(rng);
    Rng draw(rng.Next());
    for (const SelectionResult &r :
         {RandomSample(pool, budget, draw), TopN(pool, budget, scores)}) {
      ++instances;
      if (r.realized_duration_s > budget.seconds()) ++over;
      if (total > budget.seconds()) {
        double gap = budget.seconds() - r.realized_duration_s;
        worst_gap = std::max(worst_gap, gap / max_seg);
        if (r.realized_duration_s < budget.seconds() - max_seg) ++loose;
      }
    }
  }
  return {over == 0 && loose == 0,
          Fmt("%zu selections, %zu over budget, %zu looser than one max segment "
              "(worst gap %.3f max segments)",
              instances, over, loose, worst_gap)};
}

// 5. ---------------------------------------------------------------------
Outcome ClassBalance() {
  Rng gen(1005);
  SegmentPool pool =
      synth::EntityPool({{"PER", 0.5}, {"ORG", 0.3}, {"LOC", 0.2}}, 10.0, gen, 1.0, 20.0);
  EntityClassStats st = ClassStatsOf(pool);
  const double max_seg = MaxDuration(pool);
  const Budget budget = Budget::Hours(1);

  Rng rng(42);
  std::vector<std::pair<std::string, SelectionResult>> runs{
      {"ner-class-random", SelectNerClassBalancedRandom(pool, budget, rng)},
      {"ner-class-top-conf", SelectNerClassBalancedTopConfidence(pool, budget)}};
  bool pass = true;
  double worst = 0;
  std::string shares;
  for (const auto &[cls, c] : st.classes)
    shares += Fmt("%s%s=%.4f", shares.empty() ? "" : " ", cls.c_str(), c.share);
  for (const auto &[name, r] : runs) {
    std::set<std::string> uniq(r.selected_ids.begin(), r.selected_ids.end());
    pass = pass && uniq.size() == r.selected_ids.size() &&
           r.realized_duration_s <= budget.seconds();
    std::map<std::string, double> realized;
    for (const auto &id : r.selected_ids)
      realized[pool.Get(id).entities->front().entity_class] += pool.Get(id).duration_s;
    for (const auto &[cls, c] : st.classes) {
      double dev = std::abs(realized[cls] - c.share * budget.seconds());
      worst = std::max(worst, dev);
      pass = pass && dev <= max_seg;
    }
  }
  return {pass, Fmt("P {%s}, worst |realized - P_c N| %.2f s vs max segment %.2f s, "
                    "no duplicates",
                    shares.c_str(), worst, max_seg)};
}

// 6. ---------------------------------------------------------------------
const std::vector<std::string> kStrategies{"random",          "wer-clf",
                                           "ner-random",      "ner-top-conf",
                                           "ner-class-random", "ner-class-top-conf",
                                           "cer"};

Outcome Determinism(const fs::path &work) {
  synth::CorpusOptions o;
  o.hours = 8;
  o.acoustic_dim = 4;
  o.text_dim = 4;
  o.with_references = true;
  Rng gen(1006);
  SegmentPool corpus = synth::SyntheticCorpus(o, gen);
  const std::string in = (work / "det.jsonl").string();
  const std::string model = (work / "det_model.json").string();
  WriteManifest(corpus, in);
  if (Cli({"train-wer", "-i", in, "--model", model}) != 0) return {false, "train-wer failed"};

  std::size_t identical = 0;
  for (const auto &strat : kStrategies) {
    std::string dirs[2];
    for (int rep = 0; rep < 2; ++rep) {
      dirs[rep] = (work / ("det_" + strat + std::to_string(rep))).string();
      std::vector<std::string> args{"select", "-i", in, "-o", dirs[rep], "-s", strat,
                                    "--budget-hours", "1", "--seed", "42"};
      if (strat == "wer-clf") args.insert(args.end(), {"--model", model});
      if (Cli(args) != 0) return {false, strat + " failed"};
    }
    bool same = true;
    for (const char *f : {"manifest.jsonl", "report.json", "report.txt"})
      same = same && Slurp(fs::path(dirs[0]) / f) == Slurp(fs::path(dirs[1]) / f);
    identical += same;
  }

  // Seed sensitivity on exactly 1000 segments.
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < 1000; ++i) ids.push_back(corpus[i].id);
  const std::string small = (work / "det1000.jsonl").string();
  WriteManifest(corpus.Subset(ids), small);
  std::size_t changed = 0;
  const std::vector<std::string> random_strategies{"random", "ner-random",
                                                   "ner-class-random", "cer"};
  for (const auto &strat : random_strategies) {
    std::string out[2];
    const char *seeds[2] = {"42", "43"};
    for (int k = 0; k < 2; ++k) {
      out[k] = (work / ("seed_" + strat + seeds[k])).string();
      if (Cli({"select", "-i", small, "-o", out[k], "-s", strat, "--budget-hours", "0.2",
               "--seed", seeds[k]}) != 0)
        return {false, strat + " failed"};
    }
    changed += Slurp(fs::path(out[0]) / "manifest.jsonl") !=
               Slurp(fs::path(out[1]) / "manifest.jsonl");
  }
  return {identical == kStrategies.size() && changed == random_strategies.size(),
          Fmt("%zu/%zu strategies byte-identical at seed 42, %zu/%zu random strategies "
              "changed with seed 43",
              identical, kStrategies.size(), changed, random_strategies.size())};
}

// 7. ---------------------------------------------------------------------
Outcome SvmSanity() {
  Rng gen(1007);
  SegmentPool train = synth::SeparablePool(200, 0.5, gen, "train");
  SegmentPool held = synth::SeparablePool(1000, 0.5, gen, "held");
  LinearSvmModel m = TrainSvm(train);
  double train_acc = Evaluate(m, train).accuracy;
  double held_acc = Evaluate(m, held).accuracy;

  // Hand arithmetic for the matrix below.
  ConfusionMatrix cm;
  cm.low_as_low = 40;
  cm.low_as_high = 10;
  cm.high_as_low = 5;
  cm.high_as_high = 45;
  ClassificationReport r = ReportFromConfusion(cm);
  const double expected[] = {0.888889, 0.8, 0.842105, 0.818182, 0.9, 0.857143, 0.85};
  const double got[] = {r.low_wer.precision,  r.low_wer.recall,  r.low_wer.f1,
                        r.high_wer.precision, r.high_wer.recall, r.high_wer.f1,
                        r.accuracy};
  double worst = 0;
  for (int i = 0; i < 7; ++i) worst = std::max(worst, std::abs(expected[i] - got[i]));
  return {train_acc == 1.0 && held_acc >= 0.98 && worst <= 1e-4,
          Fmt("train accuracy %.4f, held-out accuracy %.4f, metric error %.2g", train_acc,
              held_acc, worst)};
}

// 8. ---------------------------------------------------------------------
Outcome HistogramConservation() {
  Rng rng(1008);
  std::vector<Segment> segs;
  std::vector<synth::PlantedCer> plants;
  double total = 0, low = 0;
  for (std::size_t i = 0; i < 20000; ++i) {
    synth::PlantedCer pc;
    pc.length = 40 + rng.Below(81);
    double d = synth::Uniform(rng, 1, 20);
    // Keep the low-CER share of duration tracking 18%.
    if (low < 0.18 * (total + d)) {
      std::size_t hi = pc.length * 3 / 100;
      pc.a = rng.Below(hi + 1);
      pc.b = rng.Below(hi + 1);
    } else {
      std::size_t lo = (pc.length * 6 + 99) / 100;
      pc.a = lo + rng.Below(pc.length / 2 - lo + 1);
      pc.b = lo + rng.Below(pc.length / 2 - lo + 1);
    }
    if (pc.Below(1, 20)) low += d;
    total += d;
    segs.push_back(synth::MakeSegment(synth::SegId(i), d, synth::PlantedHypotheses(pc, rng)));
    plants.push_back(pc);
  }
  SegmentPool pool(std::move(segs));
  CerScoring sc = ScorePool(pool, CerFilterConfig{}, DefaultThreads());
  CerHistogram h = CerHistogramOf(sc.scores, pool, 0.05);
  double sum = 0;
  for (const auto &b : h.bins) sum += b.duration_s;
  double conservation = std::abs(sum - pool.total_duration_s());
  double first = h.Fraction(0);
  return {conservation <= 1e-6 && std::abs(first - 0.18) <= 0.005,
          Fmt("bin sum off by %.3g s, planted low share %.4f, first bin %.4f", conservation,
              low / total, first)};
}

// 9. ---------------------------------------------------------------------
Outcome EndToEnd(const fs::path &work) {
  synth::CorpusOptions o;
  o.hours = 500;
  o.acoustic_dim = 4;
  o.text_dim = 4;
  Rng gen(1009);
  SegmentPool corpus = synth::SyntheticCorpus(o, gen);
  const std::string in = (work / "corpus500.jsonl").string();
  WriteManifest(corpus, in);

  synth::CorpusOptions lo = o;
  lo.hours = 20;
  lo.with_references = true;
  lo.id_prefix = "lab";
  SegmentPool labelled = synth::SyntheticCorpus(lo, gen);
  const std::string lab = (work / "labelled.jsonl").string();
  const std::string model = (work / "wer_model.json").string();
  WriteManifest(labelled, lab);

  auto t0 = Clock::now();
  if (Cli({"train-wer", "-i", lab, "--model", model}) != 0) return {false, "train-wer failed"};
  std::size_t valid = 0;
  std::string realized;
  for (const auto &strat : kStrategies) {
    const fs::path out = work / ("e2e_" + strat);
    std::vector<std::string> args{"select", "-i", in, "-o", out.string(), "-s", strat,
                                  "--budget-hours", "100"};
    if (strat == "wer-clf") args.insert(args.end(), {"--model", model});
    if (Cli(args) != 0) continue;
    try {
      SegmentPool sub = ReadManifest(out / "manifest.jsonl");
      bool ok = sub.total_duration_s() <= 100 * 3600.0 && !sub.empty();
      for (const auto &s : sub) ok = ok && corpus.Contains(s.id);
      auto rep = nlohmann::ordered_json::parse(Slurp(out / "report.json"));
      ok = ok && rep.contains("selection") && !Slurp(out / "report.txt").empty();
      valid += ok;
      realized += Fmt("%s%s=%.1fh", realized.empty() ? "" : " ", strat.c_str(),
                      sub.total_duration_s() / 3600.0);
    } catch (const std::exception &e) {
      std::fprintf(stderr, "%s: %s\n", strat.c_str(), e.what());
    }
  }
  double secs = Since(t0);
  return {valid == kStrategies.size() && secs < 300.0,
          Fmt("%zu segments, %.1f h; %zu/%zu valid subsets in %.1f s (%s)", corpus.size(),
              corpus.total_duration_s() / 3600.0, valid, kStrategies.size(), secs,
              realized.c_str())};
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "dsel_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"edit distance matches oracle", EditDistanceOracle},
      {"three-system CER average", ThreeSystemAverage},
      {"planted CER retention", PlantedRetention},
      {"budget safety and tightness", BudgetSafety},
      {"class-balanced shares", ClassBalance},
      {"determinism", [&] { return Determinism(work); }},
      {"linear SVM sanity", SvmSanity},
      {"CER histogram conservation", HistogramConservation},
      {"end-to-end 500 h corpus", [&] { return EndToEnd(work); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception &e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(work);
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
