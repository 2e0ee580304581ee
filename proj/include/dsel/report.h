// dsel/report.h

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

#ifndef DSEL_REPORT_H_
#define DSEL_REPORT_H_

// Run reports.  JSON (report.json) is canonical; the aligned text tables
// (report.txt) are rendered from the same structure.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dsel/cer_selection.h"
#include "dsel/manifest.h"
#include "dsel/ner_selection.h"
#include "dsel/sampler.h"
#include "dsel/wer_classifier.h"

namespace dsel {

inline constexpr std::string_view kToolkitVersion = "dsel 1.0.0";

// One bar of the entity-class / confidence distribution chart.
struct DistributionBar {
  std::string label;
  double realized_duration_s = 0.0;
  // Selected duration without any entity annotation.
  double non_entity_s = 0.0;
  EntityClassStats stats;
};

struct DistributionReport {
  EntityClassStats total;
  std::vector<DistributionBar> bars;
};

// Per-class and per-stratum durations of each labelled selection, all drawn
// from pool.  Classes of `total` absent from a selection appear with zeros.
DistributionReport RenderDistributionReport(
    const SegmentPool &pool, const EntityClassStats &total,
    const std::vector<std::pair<std::string, SelectionResult>> &selections,
    ConfidenceAggregation agg = ConfidenceAggregation::kMax);

struct RunReport {
  std::string toolkit_version{kToolkitVersion};
  std::string command;
  std::string manifest_digest;  // "sha256:<hex>"
  double manifest_duration_s = 0.0;
  std::size_t manifest_segments = 0;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::optional<SelectionResult> selection;
  std::optional<EntityClassStats> entity_stats;
  std::optional<DistributionReport> distribution;
  std::optional<CerHistogram> cer_histogram;
  std::optional<ClassificationReport> classification;
  std::optional<double> wall_clock_s;
};

nlohmann::ordered_json ToJson(const DistributionReport &d);
DistributionReport DistributionReportFromJson(const nlohmann::ordered_json &j);

nlohmann::ordered_json ToJson(const RunReport &r);
RunReport RunReportFromJson(const nlohmann::ordered_json &j);

// Deterministic; tables for absent optional blocks are omitted.
std::string RenderTextTables(const RunReport &r);

// Writes report.json and report.txt into dir.
void WriteRunReport(const RunReport &r, const std::filesystem::path &dir);

std::string Sha256Hex(std::string_view data);
std::string FileDigest(const std::filesystem::path &path);

}  // namespace dsel

#endif  // DSEL_REPORT_H_
