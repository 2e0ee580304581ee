// dsel/cer_selection.h

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

#ifndef DSEL_CER_SELECTION_H_
#define DSEL_CER_SELECTION_H_

// Inter-system agreement filtering: per-segment mean pairwise CER across the
// required ASR systems, strict threshold at tau, then budgeted sampling.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "dsel/manifest.h"
#include "dsel/sampler.h"
#include "dsel/textnorm.h"

namespace dsel {

struct CerFilterConfig {
  double tau = 0.05;
  std::vector<std::string> required_systems{"whisper", "zipformer",
                                            "parakeet"};
  NormalizationConfig norm;
  // Take the lowest-CER retained segments instead of a random sample.
  bool rank_lowest = false;

  // Throws Error unless 0 < tau <= 1 and >= 2 distinct systems are named.
  void Validate() const;
};

struct CerScore {
  std::string id;
  std::vector<PairCer> pairs;
  double average = 0.0;
};

struct CerScoring {
  std::vector<CerScore> scores;  // sorted by id
  std::vector<std::string> skipped;  // missing a required hypothesis, pool order
};

// Scores every segment carrying all required hypotheses (others are listed
// in skipped).  Throws Error if nothing is scoreable.  The output does not
// depend on threads.
CerScoring ScorePool(const SegmentPool &pool, const CerFilterConfig &cfg,
                     unsigned threads = 1);

// Scored members with average < tau, in pool order.
SegmentPool RetainLowCer(const std::vector<CerScore> &scores,
                         const SegmentPool &pool, const CerFilterConfig &cfg);

SelectionResult SelectCer(const SegmentPool &pool, const CerFilterConfig &cfg,
                          Budget budget, Rng &rng, unsigned threads = 1);

struct CerHistogramBin {
  double lo = 0.0;
  double hi = 0.0;  // exclusive except for the last bin, which closes at 1.0
  double duration_s = 0.0;
  std::size_t count = 0;
};

struct CerHistogram {
  double bin_width = 0.05;
  std::vector<CerHistogramBin> bins;
  double total_duration_s = 0.0;

  double Fraction(std::size_t bin) const {
    return total_duration_s > 0 ? bins[bin].duration_s / total_duration_s
                                : 0.0;
  }
};

// Duration per average-CER bin [0,w), [w,2w), ..., [1-w,1].
CerHistogram CerHistogramOf(const std::vector<CerScore> &scores,
                            const SegmentPool &pool, double bin_width);

nlohmann::ordered_json ToJson(const CerScore &s);
nlohmann::ordered_json ToJson(const CerHistogram &h);
CerHistogram CerHistogramFromJson(const nlohmann::ordered_json &j);

// One JSON object per line: id, per-pair CERs, average.
void WriteCerScores(const std::vector<CerScore> &scores,
                    const std::filesystem::path &path);

}  // namespace dsel

#endif  // DSEL_CER_SELECTION_H_
