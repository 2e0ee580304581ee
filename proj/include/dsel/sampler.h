// dsel/sampler.h

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

#ifndef DSEL_SAMPLER_H_
#define DSEL_SAMPLER_H_

// Budgeted sampling primitives shared by every selection pipeline:
// RandomSample(S, N) and Top-N(S, N, score).
//
// Both use never-exceed greedy fill: candidates are visited in order (shuffled
// or ranked), a segment is taken iff it still fits in the remaining budget,
// and segments that do not fit are skipped rather than ending the scan.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dsel/manifest.h"

namespace dsel {

enum class Strategy {
  kRandom,
  kWerClf,
  kNerRandom,
  kNerTopConf,
  kNerClassRandom,
  kNerClassTopConf,
  kCer,
  kTopN,
};

std::string_view StrategyName(Strategy s);
// Accepts the CLI names; throws Error listing valid names otherwise.
Strategy ParseStrategy(std::string_view name);
// The seven selectable strategies, in CLI order.
std::span<const Strategy> SelectableStrategies();

class Budget {
 public:
  static Budget Hours(double hours);
  static Budget Seconds(double seconds);

  double hours() const { return seconds_ / 3600.0; }
  double seconds() const { return seconds_; }

 private:
  explicit Budget(double seconds) : seconds_(seconds) {}
  double seconds_;
};

// Deterministic generator: std::mt19937_64, whose output sequence is fixed by
// the C++ standard.  A stream labelled L under root seed S is seeded with
// splitmix64(S ^ fnv1a64(L)); the unlabelled root stream is seeded with S
// directly.  Bounded draws use rejection sampling, so results do not depend
// on the standard library's distributions.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm =
      "mt19937_64+fnv1a64-splitmix64-streams+rejection/v1";
  static constexpr std::uint64_t kDefaultSeed = 42;

  explicit Rng(std::uint64_t seed = kDefaultSeed, std::string label = {});

  std::uint64_t Next() { return engine_(); }
  // Uniform integer in [0, n); n must be > 0.
  std::uint64_t Below(std::uint64_t n);

  // Child stream keyed by (root seed, label path).  Independent of how many
  // draws were taken from this stream.
  Rng Derive(std::string_view label) const;

  std::uint64_t seed() const { return seed_; }
  const std::string &label() const { return label_; }

 private:
  std::uint64_t seed_;
  std::string label_;
  std::mt19937_64 engine_;
};

std::uint64_t Fnv1a64(std::string_view data);
std::uint64_t SplitMix64(std::uint64_t x);

// Fisher-Yates over [0, n): for i = n-1 down to 1, swap(i, Below(i+1)).
std::vector<std::size_t> ShuffledIndices(std::size_t n, Rng &rng);

struct SelectionResult {
  Strategy strategy = Strategy::kRandom;
  std::vector<std::string> selected_ids;  // in selection order
  double realized_duration_s = 0.0;
  double budget_s = 0.0;
  std::uint64_t seed = 0;
  std::string rng_algorithm{Rng::kAlgorithm};
  std::vector<std::string> rng_streams;
  // Pool fit within the budget and was returned whole, in pool order.
  bool saturated = false;
  std::vector<std::string> warnings;
  nlohmann::ordered_json stats = nlohmann::ordered_json::object();
};

nlohmann::ordered_json ToJson(const SelectionResult &r);
SelectionResult SelectionResultFromJson(const nlohmann::ordered_json &j);

// Shuffle then greedy fill.  If the whole pool fits, returns it in pool
// order with saturated set.
SelectionResult RandomSample(const SegmentPool &pool, Budget budget, Rng &rng);

// Rank by (score desc, id asc) then greedy fill.  scores[i] belongs to
// pool[i]; a non-finite score throws Error naming the segment.
SelectionResult TopN(const SegmentPool &pool, Budget budget,
                     std::span<const double> scores);

// Greedy fill over pool indices in the given visiting order.
SelectionResult GreedyFill(const SegmentPool &pool, Budget budget,
                           std::span<const std::size_t> order);

}  // namespace dsel

#endif  // DSEL_SAMPLER_H_
