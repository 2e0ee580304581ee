// ner_selection.cc

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

#include "dsel/ner_selection.h"

#include <algorithm>
#include <unordered_set>

namespace dsel {

using nlohmann::ordered_json;

ConfidenceStratum StratumOf(double confidence) {
  if (confidence < kMidConfidenceFloor) return ConfidenceStratum::kLow;
  if (confidence <= kHighConfidenceFloor) return ConfidenceStratum::kMid;
  return ConfidenceStratum::kHigh;
}

SegmentNerView NerView(const Segment &seg, ConfidenceAggregation agg) {
  SegmentNerView v;
  v.id = seg.id;
  v.duration_s = seg.duration_s;
  if (!seg.HasEntities()) return v;

  std::map<std::string, std::pair<double, std::size_t>> acc;
  double all_max = 0.0, all_sum = 0.0;
  for (const auto &e : *seg.entities) {
    auto &[value, count] = acc[e.entity_class];
    if (agg == ConfidenceAggregation::kMax)
      value = count == 0 ? e.confidence : std::max(value, e.confidence);
    else
      value += e.confidence;
    ++count;
    all_max = std::max(all_max, e.confidence);
    all_sum += e.confidence;
  }
  for (const auto &[cls, vc] : acc)
    v.class_confidence[cls] = agg == ConfidenceAggregation::kMax
                                  ? vc.first
                                  : vc.first / static_cast<double>(vc.second);
  v.confidence = agg == ConfidenceAggregation::kMax
                     ? all_max
                     : all_sum / static_cast<double>(seg.entities->size());
  return v;
}

std::vector<std::string> EntityClassStats::ClassOrder() const {
  std::vector<std::string> order;
  for (const auto &[cls, _] : classes) order.push_back(cls);
  std::stable_sort(order.begin(), order.end(),
                   [&](const std::string &a, const std::string &b) {
                     return classes.at(a).share > classes.at(b).share;
                   });
  return order;
}

SegmentPool FilterEntitySegments(const SegmentPool &pool) {
  return pool.Filter([](const Segment &s) { return s.HasEntities(); });
}

EntityClassStats ClassStatsOf(const SegmentPool &pool,
                              ConfidenceAggregation agg) {
  if (pool.empty()) throw Error("entity class stats of an empty pool");
  EntityClassStats st;
  for (const auto &s : pool) {
    if (!s.HasEntities()) continue;
    SegmentNerView v = NerView(s, agg);
    ++st.segment_count;
    st.segment_duration_s += s.duration_s;
    for (const auto &[cls, conf] : v.class_confidence) {
      ClassStats &c = st.classes[cls];
      c.duration_s += s.duration_s;
      ++c.segment_count;
      switch (StratumOf(conf)) {
        case ConfidenceStratum::kLow: c.low_s += s.duration_s; break;
        case ConfidenceStratum::kMid: c.mid_s += s.duration_s; break;
        case ConfidenceStratum::kHigh: c.high_s += s.duration_s; break;
      }
    }
  }
  for (const auto &[cls, c] : st.classes) st.attributed_duration_s += c.duration_s;
  for (auto &[cls, c] : st.classes)
    c.share = c.duration_s / st.attributed_duration_s;
  return st;
}

SegmentPool ClassPool(const SegmentPool &pool, const std::string &entity_class) {
  return pool.Filter([&](const Segment &s) {
    if (!s.HasEntities()) return false;
    return std::any_of(s.entities->begin(), s.entities->end(),
                       [&](const EntityAnnotation &e) {
                         return e.entity_class == entity_class;
                       });
  });
}

SelectionResult SelectNerRandom(const SegmentPool &pool, Budget budget,
                                Rng &rng) {
  SegmentPool ner = FilterEntitySegments(pool);
  SelectionResult r = RandomSample(ner, budget, rng);
  r.strategy = Strategy::kNerRandom;
  r.stats["entity_segments"] = ner.size();
  r.stats["entity_duration_s"] = ner.total_duration_s();
  return r;
}

namespace {

std::vector<double> Confidences(const SegmentPool &pool,
                                ConfidenceAggregation agg,
                                const std::string *entity_class) {
  std::vector<double> scores;
  scores.reserve(pool.size());
  for (const auto &s : pool) {
    SegmentNerView v = NerView(s, agg);
    scores.push_back(entity_class ? v.class_confidence.at(*entity_class)
                                  : v.confidence);
  }
  return scores;
}

enum class Within { kRandom, kTopConfidence };

SelectionResult ClassBalanced(const SegmentPool &pool, Budget budget,
                              Within within, Rng *rng,
                              ConfidenceAggregation agg) {
  SegmentPool ner = FilterEntitySegments(pool);
  SelectionResult r;
  r.budget_s = budget.seconds();
  if (ner.empty()) {
    r.warnings.push_back("no entity-bearing segments");
    return r;
  }

  EntityClassStats st = ClassStatsOf(ner, agg);
  std::unordered_set<std::string> taken;
  ordered_json per_class = ordered_json::array();
  for (const std::string &cls : st.ClassOrder()) {
    const ClassStats &c = st.classes.at(cls);
    const double target_s = c.share * budget.seconds();
    SegmentPool candidates = ClassPool(ner, cls).Filter(
        [&](const Segment &s) { return taken.count(s.id) == 0; });

    SelectionResult part;
    if (!candidates.empty() && target_s > 0) {
      Budget nc = Budget::Seconds(target_s);
      if (within == Within::kRandom) {
        Rng stream = rng->Derive("class:" + cls);
        part = RandomSample(candidates, nc, stream);
        r.rng_streams.push_back(stream.label());
      } else {
        part = TopN(candidates, nc, Confidences(candidates, agg, &cls));
      }
    }
    for (const auto &id : part.selected_ids) {
      taken.insert(id);
      r.selected_ids.push_back(id);
    }

    ordered_json pc;
    pc["entity_class"] = cls;
    pc["share"] = c.share;
    pc["target_s"] = target_s;
    pc["available_s"] = candidates.total_duration_s();
    pc["selected_s"] = part.realized_duration_s;
    pc["selected_count"] = part.selected_ids.size();
    double shortfall = std::max(0.0, target_s - candidates.total_duration_s());
    pc["shortfall_s"] = shortfall;
    if (shortfall > 0)
      r.warnings.push_back("class " + cls + " short of its target by " +
                           std::to_string(shortfall) + " s");
    per_class.push_back(std::move(pc));
  }

  // Recompute the realized total in selection order, then trim from the end.
  double realized = 0.0;
  for (const auto &id : r.selected_ids) realized += ner.Get(id).duration_s;
  std::size_t trimmed = 0;
  while (realized > budget.seconds() && !r.selected_ids.empty()) {
    realized -= ner.Get(r.selected_ids.back()).duration_s;
    r.selected_ids.pop_back();
    ++trimmed;
  }
  if (trimmed > 0) {
    realized = 0.0;
    for (const auto &id : r.selected_ids) realized += ner.Get(id).duration_s;
  }
  r.realized_duration_s = realized;
  r.stats["entity_segments"] = ner.size();
  r.stats["entity_duration_s"] = ner.total_duration_s();
  r.stats["classes"] = std::move(per_class);
  r.stats["trimmed_count"] = trimmed;
  return r;
}

}  // namespace

SelectionResult SelectNerTopConfidence(const SegmentPool &pool, Budget budget,
                                       ConfidenceAggregation agg) {
  SegmentPool ner = FilterEntitySegments(pool);
  SelectionResult r = TopN(ner, budget, Confidences(ner, agg, nullptr));
  r.strategy = Strategy::kNerTopConf;
  r.stats["entity_segments"] = ner.size();
  r.stats["entity_duration_s"] = ner.total_duration_s();
  return r;
}

SelectionResult SelectNerClassBalancedRandom(const SegmentPool &pool,
                                             Budget budget, Rng &rng,
                                             ConfidenceAggregation agg) {
  SelectionResult r = ClassBalanced(pool, budget, Within::kRandom, &rng, agg);
  r.strategy = Strategy::kNerClassRandom;
  r.seed = rng.seed();
  return r;
}

SelectionResult SelectNerClassBalancedTopConfidence(
    const SegmentPool &pool, Budget budget, ConfidenceAggregation agg) {
  SelectionResult r =
      ClassBalanced(pool, budget, Within::kTopConfidence, nullptr, agg);
  r.strategy = Strategy::kNerClassTopConf;
  return r;
}

namespace {

ordered_json ClassStatsJson(const ClassStats &c) {
  ordered_json j;
  j["duration_s"] = c.duration_s;
  j["segment_count"] = c.segment_count;
  j["share"] = c.share;
  j["low_s"] = c.low_s;
  j["mid_s"] = c.mid_s;
  j["high_s"] = c.high_s;
  return j;
}

}  // namespace

ordered_json ToJson(const EntityClassStats &st) {
  ordered_json j;
  j["segment_count"] = st.segment_count;
  j["segment_duration_s"] = st.segment_duration_s;
  j["attributed_duration_s"] = st.attributed_duration_s;
  j["classes"] = ordered_json::object();
  for (const auto &[cls, c] : st.classes) j["classes"][cls] = ClassStatsJson(c);
  return j;
}

EntityClassStats EntityClassStatsFromJson(const ordered_json &j) {
  EntityClassStats st;
  st.segment_count = j.at("segment_count").get<std::size_t>();
  st.segment_duration_s = j.at("segment_duration_s").get<double>();
  st.attributed_duration_s = j.at("attributed_duration_s").get<double>();
  for (const auto &item : j.at("classes").items()) {
    const auto &v = item.value();
    ClassStats c;
    c.duration_s = v.at("duration_s").get<double>();
    c.segment_count = v.at("segment_count").get<std::size_t>();
    c.share = v.at("share").get<double>();
    c.low_s = v.at("low_s").get<double>();
    c.mid_s = v.at("mid_s").get<double>();
    c.high_s = v.at("high_s").get<double>();
    st.classes[item.key()] = c;
  }
  return st;
}

}  // namespace dsel
