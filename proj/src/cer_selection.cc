// cer_selection.cc

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

#include "dsel/cer_selection.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>

#include "dsel/parallel.h"

namespace dsel {

using nlohmann::ordered_json;

void CerFilterConfig::Validate() const {
  if (!(tau > 0.0 && tau <= 1.0))
    throw Error("tau must lie in (0, 1], got " + std::to_string(tau));
  std::set<std::string> distinct(required_systems.begin(),
                                 required_systems.end());
  if (distinct.size() < 2 || distinct.size() != required_systems.size())
    throw Error("need at least two distinct required systems");
}

CerScoring ScorePool(const SegmentPool &pool, const CerFilterConfig &cfg,
                     unsigned threads) {
  cfg.Validate();
  std::vector<std::optional<CerScore>> slots(pool.size());
  ParallelChunks(pool.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Segment &s = pool[i];
      std::map<std::string, std::string> hyps;
      bool complete = true;
      for (const auto &sys : cfg.required_systems) {
        auto it = s.hypotheses.find(sys);
        if (it == s.hypotheses.end()) {
          complete = false;
          break;
        }
        hyps.emplace(sys, it->second);
      }
      if (!complete) continue;
      CerAverage avg = CerAvgDetailed(hyps, cfg.norm, s.id);
      slots[i] = CerScore{s.id, std::move(avg.pairs), avg.average};
    }
  });

  CerScoring out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i])
      out.scores.push_back(std::move(*slots[i]));
    else
      out.skipped.push_back(pool[i].id);
  }
  if (out.scores.empty()) {
    std::string systems;
    for (const auto &s : cfg.required_systems)
      systems += (systems.empty() ? "" : ", ") + s;
    throw Error("no scoreable segments: none of " +
                std::to_string(pool.size()) +
                " segments carries all required hypotheses (" + systems + ")");
  }
  std::sort(out.scores.begin(), out.scores.end(),
            [](const CerScore &a, const CerScore &b) { return a.id < b.id; });
  return out;
}

SegmentPool RetainLowCer(const std::vector<CerScore> &scores,
                         const SegmentPool &pool, const CerFilterConfig &cfg) {
  std::unordered_map<std::string, double> avg;
  avg.reserve(scores.size());
  for (const auto &s : scores) avg.emplace(s.id, s.average);
  return pool.Filter([&](const Segment &s) {
    auto it = avg.find(s.id);
    return it != avg.end() && it->second < cfg.tau;
  });
}

SelectionResult SelectCer(const SegmentPool &pool, const CerFilterConfig &cfg,
                          Budget budget, Rng &rng, unsigned threads) {
  CerScoring scoring = ScorePool(pool, cfg, threads);
  SegmentPool retained = RetainLowCer(scoring.scores, pool, cfg);

  SelectionResult r;
  if (cfg.rank_lowest) {
    std::unordered_map<std::string, double> avg;
    for (const auto &s : scoring.scores) avg.emplace(s.id, s.average);
    std::vector<double> neg;
    neg.reserve(retained.size());
    for (const auto &s : retained) neg.push_back(-avg.at(s.id));
    r = TopN(retained, budget, neg);
    r.seed = rng.seed();
  } else {
    r = RandomSample(retained, budget, rng);
  }
  r.strategy = Strategy::kCer;
  r.stats["tau"] = cfg.tau;
  r.stats["rank_lowest"] = cfg.rank_lowest;
  r.stats["scored_count"] = scoring.scores.size();
  r.stats["skipped_count"] = scoring.skipped.size();
  r.stats["retained_count"] = retained.size();
  r.stats["retained_s"] = retained.total_duration_s();
  if (retained.empty())
    r.warnings.push_back("no segment has average CER below tau");
  if (!scoring.skipped.empty())
    r.warnings.push_back(std::to_string(scoring.skipped.size()) +
                         " segments skipped for missing hypotheses");
  return r;
}

CerHistogram CerHistogramOf(const std::vector<CerScore> &scores,
                            const SegmentPool &pool, double bin_width) {
  if (!(bin_width > 0.0 && bin_width <= 1.0))
    throw Error("bin width must lie in (0, 1]");
  CerHistogram h;
  h.bin_width = bin_width;
  const auto nbins =
      static_cast<std::size_t>(std::ceil(1.0 / bin_width - 1e-9));
  h.bins.resize(nbins);
  // b / (1/w) rounds 19 * 0.05 to 0.95, where b * w gives 0.9500000000000001.
  const double per_unit = 1.0 / bin_width;
  for (std::size_t b = 0; b < nbins; ++b) {
    h.bins[b].lo = static_cast<double>(b) / per_unit;
    h.bins[b].hi = b + 1 == nbins ? 1.0 : static_cast<double>(b + 1) / per_unit;
  }
  for (const auto &s : scores) {
    const double d = pool.Get(s.id).duration_s;
    // Locate by the same lo/hi values the bins report.
    auto b = static_cast<std::size_t>(
        std::clamp(std::floor(s.average / bin_width), 0.0,
                   static_cast<double>(nbins - 1)));
    while (b + 1 < nbins && s.average >= h.bins[b].hi) ++b;
    while (b > 0 && s.average < h.bins[b].lo) --b;
    h.bins[b].duration_s += d;
    ++h.bins[b].count;
    h.total_duration_s += d;
  }
  return h;
}

ordered_json ToJson(const CerScore &s) {
  ordered_json j;
  j["id"] = s.id;
  ordered_json pairs = ordered_json::object();
  for (const auto &p : s.pairs) pairs[p.system_a + "-" + p.system_b] = p.cer;
  j["pairs"] = std::move(pairs);
  j["average"] = s.average;
  return j;
}

ordered_json ToJson(const CerHistogram &h) {
  ordered_json j;
  j["bin_width"] = h.bin_width;
  j["total_duration_s"] = h.total_duration_s;
  ordered_json bins = ordered_json::array();
  for (std::size_t b = 0; b < h.bins.size(); ++b) {
    ordered_json jb;
    jb["lo"] = h.bins[b].lo;
    jb["hi"] = h.bins[b].hi;
    jb["duration_s"] = h.bins[b].duration_s;
    jb["count"] = h.bins[b].count;
    jb["fraction"] = h.Fraction(b);
    bins.push_back(std::move(jb));
  }
  j["bins"] = std::move(bins);
  return j;
}

CerHistogram CerHistogramFromJson(const ordered_json &j) {
  CerHistogram h;
  h.bin_width = j.at("bin_width").get<double>();
  h.total_duration_s = j.at("total_duration_s").get<double>();
  for (const auto &jb : j.at("bins")) {
    CerHistogramBin b;
    b.lo = jb.at("lo").get<double>();
    b.hi = jb.at("hi").get<double>();
    b.duration_s = jb.at("duration_s").get<double>();
    b.count = jb.at("count").get<std::size_t>();
    h.bins.push_back(b);
  }
  return h;
}

void WriteCerScores(const std::vector<CerScore> &scores,
                    const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  for (const auto &s : scores) out << ToJson(s).dump() << '\n';
  out.close();
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace dsel
