// dsel/manifest.h

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

#ifndef DSEL_MANIFEST_H_
#define DSEL_MANIFEST_H_

// Corpus data model and the JSON-lines manifest format.
//
// A manifest is a UTF-8 text file with one JSON object per line.  The first
// line may be a header object {"header": true, "annotation_system": ...,
// "schema_version": 1}; every other line is one segment:
//
//   {"id": "c1-0001", "conversation_id": "c1", "start_s": 0.0,
//    "duration_s": 3.2, "hypotheses": {"whisper": "...", ...},
//    "reference": "...", "wer_vs_reference": 0.1,
//    "entities": [{"entity_class": "PER", "char_start": 0, "char_end": 4,
//                  "confidence": 0.93}],
//    "features": {"acoustic_dim": 768, "text_dim": 1024, "values": [...]}}
//
// Optional fields are omitted, never written as null.  Entity spans index
// Unicode scalar values of the hypothesis named by the header's
// annotation_system.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dsel/error.h"

namespace dsel {

inline constexpr int kManifestSchemaVersion = 1;

struct EntityAnnotation {
  std::string entity_class;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  double confidence = 0.0;

  bool operator==(const EntityAnnotation &) const = default;
};

struct FeatureVector {
  std::size_t acoustic_dim = 0;
  std::size_t text_dim = 0;
  std::vector<double> values;

  std::size_t dim() const { return acoustic_dim + text_dim; }
  std::span<const double> acoustic() const {
    return std::span<const double>(values).first(acoustic_dim);
  }
  std::span<const double> text() const {
    return std::span<const double>(values).subspan(acoustic_dim, text_dim);
  }

  // Builds f(s) = [acoustic; text].
  static FeatureVector Concat(std::span<const double> acoustic,
                              std::span<const double> text);

  bool operator==(const FeatureVector &) const = default;
};

struct Segment {
  std::string id;
  std::string conversation_id;
  double start_s = 0.0;
  double duration_s = 0.0;
  std::map<std::string, std::string> hypotheses;
  std::optional<std::string> reference;
  std::optional<std::vector<EntityAnnotation>> entities;
  std::optional<FeatureVector> features;
  std::optional<double> wer_vs_reference;

  bool HasEntities() const { return entities && !entities->empty(); }

  bool operator==(const Segment &) const = default;
};

struct ManifestHeader {
  std::optional<std::string> annotation_system;
  int schema_version = kManifestSchemaVersion;

  bool operator==(const ManifestHeader &) const = default;
};

// Checks the per-segment invariants.  Throws ManifestError naming the
// offending field; `line` is echoed into the error (0 if unknown).
void ValidateSegment(const Segment &seg, const ManifestHeader &header,
                     std::size_t line = 0);

// Ordered, id-unique, immutable collection of segments.
class SegmentPool {
 public:
  SegmentPool() = default;
  // Validates every segment and id uniqueness.
  explicit SegmentPool(std::vector<Segment> segments,
                       ManifestHeader header = {});

  const std::vector<Segment> &segments() const { return segments_; }
  const ManifestHeader &header() const { return header_; }
  double total_duration_s() const { return total_duration_s_; }
  std::size_t size() const { return segments_.size(); }
  bool empty() const { return segments_.empty(); }

  const Segment &operator[](std::size_t i) const { return segments_[i]; }
  auto begin() const { return segments_.begin(); }
  auto end() const { return segments_.end(); }

  bool Contains(const std::string &id) const { return index_.count(id) > 0; }
  // Throws Error if absent.
  const Segment &Get(const std::string &id) const;
  std::optional<std::size_t> IndexOf(const std::string &id) const;

  // Members for which pred holds, in pool order.
  template <typename Pred>
  SegmentPool Filter(Pred &&pred) const {
    std::vector<Segment> kept;
    for (const auto &s : segments_)
      if (pred(s)) kept.push_back(s);
    return SegmentPool(std::move(kept), header_, /*trusted=*/true);
  }

  // Members whose ids are listed, in pool order.  Unknown ids throw.
  SegmentPool Subset(std::span<const std::string> ids) const;

  bool operator==(const SegmentPool &other) const {
    return header_ == other.header_ && segments_ == other.segments_;
  }

 private:
  // Skips validation for segments already drawn from a valid pool.
  SegmentPool(std::vector<Segment> segments, ManifestHeader header,
              bool trusted);
  void BuildIndex(bool validate);

  std::vector<Segment> segments_;
  ManifestHeader header_;
  std::unordered_map<std::string, std::size_t> index_;
  double total_duration_s_ = 0.0;
};

// Parses a manifest.  With threads > 1 lines are parsed in parallel chunks;
// the result is identical to the sequential parse.
SegmentPool ReadManifest(const std::filesystem::path &path,
                         unsigned threads = 1);
SegmentPool ParseManifest(const std::string &text, unsigned threads = 1);

void WriteManifest(const SegmentPool &pool, const std::filesystem::path &path);
std::string SerializeManifest(const SegmentPool &pool);

}  // namespace dsel

#endif  // DSEL_MANIFEST_H_
