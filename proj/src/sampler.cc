// sampler.cc

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

#include "dsel/sampler.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dsel {

namespace {

struct StrategyEntry {
  Strategy strategy;
  std::string_view name;
};

constexpr StrategyEntry kStrategies[] = {
    {Strategy::kRandom, "random"},
    {Strategy::kWerClf, "wer-clf"},
    {Strategy::kNerRandom, "ner-random"},
    {Strategy::kNerTopConf, "ner-top-conf"},
    {Strategy::kNerClassRandom, "ner-class-random"},
    {Strategy::kNerClassTopConf, "ner-class-top-conf"},
    {Strategy::kCer, "cer"},
    {Strategy::kTopN, "top-n"},
};

constexpr Strategy kSelectable[] = {
    Strategy::kRandom,         Strategy::kWerClf,
    Strategy::kNerRandom,      Strategy::kNerTopConf,
    Strategy::kNerClassRandom, Strategy::kNerClassTopConf,
    Strategy::kCer,
};

}  // namespace

std::string_view StrategyName(Strategy s) {
  for (const auto &e : kStrategies)
    if (e.strategy == s) return e.name;
  return "unknown";
}

Strategy ParseStrategy(std::string_view name) {
  for (Strategy s : kSelectable)
    if (StrategyName(s) == name) return s;
  std::string valid;
  for (Strategy s : kSelectable) {
    if (!valid.empty()) valid += ", ";
    valid += StrategyName(s);
  }
  throw Error("unknown strategy '" + std::string(name) +
              "'; valid strategies: " + valid);
}

std::span<const Strategy> SelectableStrategies() { return kSelectable; }

Budget Budget::Hours(double hours) {
  if (!(hours > 0) || !std::isfinite(hours))
    throw Error("budget must be a positive number of hours");
  return Budget(hours * 3600.0);
}

Budget Budget::Seconds(double seconds) {
  if (!(seconds > 0) || !std::isfinite(seconds))
    throw Error("budget must be a positive number of seconds");
  return Budget(seconds);
}

std::uint64_t Fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::string label)
    : seed_(seed),
      label_(std::move(label)),
      engine_(label_.empty() ? seed : SplitMix64(seed ^ Fnv1a64(label_))) {}

std::uint64_t Rng::Below(std::uint64_t n) {
  // Largest multiple of n representable is 2^64 - (2^64 mod n).
  std::uint64_t rem = (0 - n) % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (rem != 0 && x >= 0 - rem);
  return x % n;
}

Rng Rng::Derive(std::string_view label) const {
  std::string path = label_.empty() ? std::string(label)
                                    : label_ + "/" + std::string(label);
  return Rng(seed_, std::move(path));
}

std::vector<std::size_t> ShuffledIndices(std::size_t n, Rng &rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i-- > 1;) {
    std::size_t j = static_cast<std::size_t>(rng.Below(i + 1));
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

SelectionResult GreedyFill(const SegmentPool &pool, Budget budget,
                           std::span<const std::size_t> order) {
  SelectionResult r;
  r.budget_s = budget.seconds();
  double min_dur = std::numeric_limits<double>::infinity();
  for (const auto &s : pool) min_dur = std::min(min_dur, s.duration_s);

  double used = 0.0;
  for (std::size_t i : order) {
    // Nothing left can fit once the remainder drops below the shortest
    // segment in the pool.
    if (budget.seconds() - used < min_dur) break;
    const Segment &s = pool[i];
    if (used + s.duration_s <= budget.seconds()) {
      used += s.duration_s;
      r.selected_ids.push_back(s.id);
    }
  }
  r.realized_duration_s = used;
  return r;
}

namespace {

SelectionResult Saturated(const SegmentPool &pool, Budget budget) {
  SelectionResult r;
  r.budget_s = budget.seconds();
  r.saturated = true;
  double used = 0.0;
  for (const auto &s : pool) {
    r.selected_ids.push_back(s.id);
    used += s.duration_s;
  }
  r.realized_duration_s = used;
  return r;
}

bool Fits(const SegmentPool &pool, Budget budget) {
  // Summation in pool order, the same order Saturated() reports.
  double total = 0.0;
  for (const auto &s : pool) total += s.duration_s;
  return total <= budget.seconds();
}

}  // namespace

SelectionResult RandomSample(const SegmentPool &pool, Budget budget,
                             Rng &rng) {
  SelectionResult r;
  if (Fits(pool, budget)) {
    r = Saturated(pool, budget);
  } else {
    auto order = ShuffledIndices(pool.size(), rng);
    r = GreedyFill(pool, budget, order);
  }
  r.strategy = Strategy::kRandom;
  r.seed = rng.seed();
  r.rng_streams.push_back(rng.label().empty() ? "<root>" : rng.label());
  return r;
}

SelectionResult TopN(const SegmentPool &pool, Budget budget,
                     std::span<const double> scores) {
  if (scores.size() != pool.size())
    throw Error("TopN: " + std::to_string(scores.size()) + " scores for " +
                std::to_string(pool.size()) + " segments");
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (!std::isfinite(scores[i]))
      throw Error("non-finite score for segment '" + pool[i].id + "'");

  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return pool[a].id < pool[b].id;
  });
  SelectionResult r = GreedyFill(pool, budget, order);
  r.strategy = Strategy::kTopN;
  return r;
}

nlohmann::ordered_json ToJson(const SelectionResult &r) {
  nlohmann::ordered_json j;
  j["strategy"] = StrategyName(r.strategy);
  j["selected_count"] = r.selected_ids.size();
  j["realized_duration_s"] = r.realized_duration_s;
  j["budget_s"] = r.budget_s;
  j["seed"] = r.seed;
  j["rng_algorithm"] = r.rng_algorithm;
  j["rng_streams"] = r.rng_streams;
  j["saturated"] = r.saturated;
  j["warnings"] = r.warnings;
  j["stats"] = r.stats;
  j["selected_ids"] = r.selected_ids;
  return j;
}

SelectionResult SelectionResultFromJson(const nlohmann::ordered_json &j) {
  SelectionResult r;
  r.strategy = Strategy::kTopN;
  std::string name = j.at("strategy").get<std::string>();
  for (const auto &e : kStrategies)
    if (e.name == name) r.strategy = e.strategy;
  r.selected_ids = j.at("selected_ids").get<std::vector<std::string>>();
  r.realized_duration_s = j.at("realized_duration_s").get<double>();
  r.budget_s = j.at("budget_s").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.rng_algorithm = j.at("rng_algorithm").get<std::string>();
  r.rng_streams = j.at("rng_streams").get<std::vector<std::string>>();
  r.saturated = j.at("saturated").get<bool>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  r.stats = j.at("stats");
  return r;
}

}  // namespace dsel
