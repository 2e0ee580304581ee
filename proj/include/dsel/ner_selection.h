// dsel/ner_selection.h

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

#ifndef DSEL_NER_SELECTION_H_
#define DSEL_NER_SELECTION_H_

// Named-entity driven selection over segments with entity annotations:
// random, top-confidence, and their class-balanced variants where class c
// receives N_c = P_c * N of the budget.

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "dsel/manifest.h"
#include "dsel/sampler.h"

namespace dsel {

enum class ConfidenceAggregation { kMax, kMean };

// Reporting strata: low < 0.5 <= mid <= 0.8 < high.
inline constexpr double kMidConfidenceFloor = 0.5;
inline constexpr double kHighConfidenceFloor = 0.8;

enum class ConfidenceStratum { kLow, kMid, kHigh };
ConfidenceStratum StratumOf(double confidence);

struct SegmentNerView {
  std::string id;
  double duration_s = 0.0;
  // Class -> aggregated confidence of that class's entities.
  std::map<std::string, double> class_confidence;
  // Aggregate over all entities of the segment.
  double confidence = 0.0;
};

SegmentNerView NerView(const Segment &seg, ConfidenceAggregation agg =
                                               ConfidenceAggregation::kMax);

struct ClassStats {
  double duration_s = 0.0;
  std::size_t segment_count = 0;
  double share = 0.0;  // P_c
  double low_s = 0.0;
  double mid_s = 0.0;
  double high_s = 0.0;
};

struct EntityClassStats {
  std::map<std::string, ClassStats> classes;
  // Sum of per-class durations; multi-class segments count once per class.
  double attributed_duration_s = 0.0;
  // Duration of distinct entity-bearing segments.
  double segment_duration_s = 0.0;
  std::size_t segment_count = 0;

  // Classes by P_c descending, ties by name ascending.
  std::vector<std::string> ClassOrder() const;
};

// Members with at least one entity annotation, in pool order.
SegmentPool FilterEntitySegments(const SegmentPool &pool);

// Duration-weighted shares P_c over the entity-bearing members of pool;
// strata use the per-class aggregated confidence.  Throws on an empty pool.
EntityClassStats ClassStatsOf(const SegmentPool &pool,
                              ConfidenceAggregation agg =
                                  ConfidenceAggregation::kMax);

// Entity-bearing members containing class c, in pool order.
SegmentPool ClassPool(const SegmentPool &pool, const std::string &entity_class);

SelectionResult SelectNerRandom(const SegmentPool &pool, Budget budget,
                                Rng &rng);

SelectionResult SelectNerTopConfidence(
    const SegmentPool &pool, Budget budget,
    ConfidenceAggregation agg = ConfidenceAggregation::kMax);

// Classes are processed in ClassOrder(); each draws from its class pool minus
// segments already taken by earlier classes, with its own stream
// rng.Derive("class:" + c).  If the union overshoots the budget, the most
// recently selected segments are dropped until it fits.
SelectionResult SelectNerClassBalancedRandom(
    const SegmentPool &pool, Budget budget, Rng &rng,
    ConfidenceAggregation agg = ConfidenceAggregation::kMax);

SelectionResult SelectNerClassBalancedTopConfidence(
    const SegmentPool &pool, Budget budget,
    ConfidenceAggregation agg = ConfidenceAggregation::kMax);

nlohmann::ordered_json ToJson(const EntityClassStats &stats);
EntityClassStats EntityClassStatsFromJson(const nlohmann::ordered_json &j);

}  // namespace dsel

#endif  // DSEL_NER_SELECTION_H_
