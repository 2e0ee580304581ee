// manifest.cc

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

#include "dsel/manifest.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "json.hpp"

#include "dsel/parallel.h"
#include "dsel/textnorm.h"

namespace dsel {

using nlohmann::json;
using nlohmann::ordered_json;

FeatureVector FeatureVector::Concat(std::span<const double> acoustic,
                                    std::span<const double> text) {
  FeatureVector f;
  f.acoustic_dim = acoustic.size();
  f.text_dim = text.size();
  f.values.reserve(acoustic.size() + text.size());
  f.values.insert(f.values.end(), acoustic.begin(), acoustic.end());
  f.values.insert(f.values.end(), text.begin(), text.end());
  return f;
}

void ValidateSegment(const Segment &seg, const ManifestHeader &header,
                     std::size_t line) {
  if (seg.id.empty()) throw ManifestError(line, "id", "must be non-empty");
  if (!std::isfinite(seg.start_s) || seg.start_s < 0)
    throw ManifestError(line, "start_s", "must be finite and >= 0");
  if (!std::isfinite(seg.duration_s) || seg.duration_s <= 0)
    throw ManifestError(line, "duration_s", "must be finite and > 0");
  if (seg.wer_vs_reference) {
    if (!std::isfinite(*seg.wer_vs_reference) || *seg.wer_vs_reference < 0)
      throw ManifestError(line, "wer_vs_reference", "must be finite and >= 0");
    if (!seg.reference)
      throw ManifestError(line, "wer_vs_reference",
                          "present without a reference transcript");
  }
  if (seg.features) {
    const auto &f = *seg.features;
    if (f.acoustic_dim == 0 || f.text_dim == 0)
      throw ManifestError(line, "features", "sub-block widths must be > 0");
    if (f.values.size() != f.dim())
      throw ManifestError(line, "features",
                          "length " + std::to_string(f.values.size()) +
                              " != acoustic_dim + text_dim = " +
                              std::to_string(f.dim()));
    for (double v : f.values)
      if (!std::isfinite(v))
        throw ManifestError(line, "features", "non-finite value");
  }
  if (seg.entities && !seg.entities->empty()) {
    if (!header.annotation_system)
      throw ManifestError(line, "entities",
                          "manifest header lacks annotation_system");
    auto it = seg.hypotheses.find(*header.annotation_system);
    if (it == seg.hypotheses.end())
      throw ManifestError(line, "entities",
                          "annotated hypothesis '" +
                              *header.annotation_system + "' is missing");
    std::size_t len = Utf8Length(it->second);
    for (const auto &e : *seg.entities) {
      if (e.entity_class.empty())
        throw ManifestError(line, "entities.entity_class", "empty class");
      if (!(e.char_start < e.char_end && e.char_end <= len))
        throw ManifestError(line, "entities.char_start",
                            "span [" + std::to_string(e.char_start) + ", " +
                                std::to_string(e.char_end) +
                                ") outside text of length " +
                                std::to_string(len));
      if (!(e.confidence >= 0.0 && e.confidence <= 1.0))
        throw ManifestError(line, "entities.confidence", "must lie in [0,1]");
    }
  }
}

SegmentPool::SegmentPool(std::vector<Segment> segments, ManifestHeader header)
    : segments_(std::move(segments)), header_(std::move(header)) {
  BuildIndex(true);
}

SegmentPool::SegmentPool(std::vector<Segment> segments, ManifestHeader header,
                         bool trusted)
    : segments_(std::move(segments)), header_(std::move(header)) {
  BuildIndex(!trusted);
}

void SegmentPool::BuildIndex(bool validate) {
  index_.reserve(segments_.size());
  total_duration_s_ = 0.0;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto &s = segments_[i];
    if (validate) ValidateSegment(s, header_);
    if (!index_.emplace(s.id, i).second) throw DuplicateIdError(s.id, 0, 0);
    total_duration_s_ += s.duration_s;
  }
}

const Segment &SegmentPool::Get(const std::string &id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error("unknown segment id '" + id + "'");
  return segments_[it->second];
}

std::optional<std::size_t> SegmentPool::IndexOf(const std::string &id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SegmentPool SegmentPool::Subset(std::span<const std::string> ids) const {
  std::vector<char> keep(segments_.size(), 0);
  for (const auto &id : ids) {
    auto it = index_.find(id);
    if (it == index_.end()) throw Error("unknown segment id '" + id + "'");
    keep[it->second] = 1;
  }
  std::vector<Segment> kept;
  for (std::size_t i = 0; i < segments_.size(); ++i)
    if (keep[i]) kept.push_back(segments_[i]);
  return SegmentPool(std::move(kept), header_, true);
}

namespace {

struct Line {
  std::size_t number;
  std::string_view text;
};

bool IsBlank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

std::vector<Line> SplitLines(const std::string &text) {
  std::vector<Line> lines;
  std::size_t pos = 0, number = 1;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string_view v(text.data() + pos, nl - pos);
    if (!IsBlank(v)) lines.push_back({number, v});
    pos = nl + 1;
    ++number;
  }
  return lines;
}

const json &Require(const json &obj, const char *field, std::size_t line) {
  auto it = obj.find(field);
  if (it == obj.end()) throw ManifestError(line, field, "missing");
  return *it;
}

std::string GetString(const json &v, const char *field, std::size_t line) {
  if (!v.is_string()) throw ManifestError(line, field, "expected a string");
  return v.get<std::string>();
}

double GetNumber(const json &v, const char *field, std::size_t line) {
  if (!v.is_number()) throw ManifestError(line, field, "expected a number");
  return v.get<double>();
}

std::size_t GetIndex(const json &v, const char *field, std::size_t line) {
  if (!v.is_number_unsigned())
    throw ManifestError(line, field, "expected a non-negative integer");
  return v.get<std::size_t>();
}

Segment ParseSegment(const json &obj, std::size_t line) {
  static const char *kKnown[] = {"id",         "conversation_id",
                                 "start_s",    "duration_s",
                                 "hypotheses", "reference",
                                 "entities",   "features",
                                 "wer_vs_reference"};
  for (const auto &item : obj.items()) {
    bool known = false;
    for (const char *k : kKnown) known = known || item.key() == k;
    if (!known) throw ManifestError(line, item.key(), "unknown field");
  }

  Segment s;
  s.id = GetString(Require(obj, "id", line), "id", line);
  s.conversation_id = GetString(Require(obj, "conversation_id", line),
                                "conversation_id", line);
  s.start_s = GetNumber(Require(obj, "start_s", line), "start_s", line);
  s.duration_s =
      GetNumber(Require(obj, "duration_s", line), "duration_s", line);

  const json &hyps = Require(obj, "hypotheses", line);
  if (!hyps.is_object())
    throw ManifestError(line, "hypotheses", "expected an object");
  for (const auto &item : hyps.items())
    s.hypotheses[item.key()] =
        GetString(item.value(), "hypotheses", line);

  if (auto it = obj.find("reference"); it != obj.end())
    s.reference = GetString(*it, "reference", line);
  if (auto it = obj.find("wer_vs_reference"); it != obj.end())
    s.wer_vs_reference = GetNumber(*it, "wer_vs_reference", line);

  if (auto it = obj.find("entities"); it != obj.end()) {
    if (!it->is_array())
      throw ManifestError(line, "entities", "expected an array");
    std::vector<EntityAnnotation> ents;
    for (const auto &e : *it) {
      if (!e.is_object())
        throw ManifestError(line, "entities", "expected objects");
      EntityAnnotation a;
      a.entity_class =
          GetString(Require(e, "entity_class", line), "entity_class", line);
      a.char_start =
          GetIndex(Require(e, "char_start", line), "char_start", line);
      a.char_end = GetIndex(Require(e, "char_end", line), "char_end", line);
      a.confidence =
          GetNumber(Require(e, "confidence", line), "confidence", line);
      ents.push_back(std::move(a));
    }
    s.entities = std::move(ents);
  }

  if (auto it = obj.find("features"); it != obj.end()) {
    if (!it->is_object())
      throw ManifestError(line, "features", "expected an object");
    FeatureVector f;
    f.acoustic_dim = GetIndex(Require(*it, "acoustic_dim", line),
                              "features.acoustic_dim", line);
    f.text_dim =
        GetIndex(Require(*it, "text_dim", line), "features.text_dim", line);
    const json &vals = Require(*it, "values", line);
    if (!vals.is_array())
      throw ManifestError(line, "features.values", "expected an array");
    f.values.reserve(vals.size());
    for (const auto &v : vals)
      f.values.push_back(GetNumber(v, "features.values", line));
    s.features = std::move(f);
  }
  return s;
}

json ParseLine(const Line &l) {
  json obj;
  try {
    obj = json::parse(l.text);
  } catch (const json::parse_error &e) {
    throw ManifestError(l.number, "", std::string("malformed JSON: ") +
                                          e.what());
  }
  if (!obj.is_object())
    throw ManifestError(l.number, "", "expected a JSON object");
  return obj;
}

ManifestHeader ParseHeader(const json &obj, std::size_t line) {
  ManifestHeader h;
  for (const auto &item : obj.items()) {
    const auto &k = item.key();
    if (k == "header") continue;
    if (k == "annotation_system") {
      h.annotation_system = GetString(item.value(), "annotation_system", line);
    } else if (k == "schema_version") {
      if (!item.value().is_number_integer())
        throw ManifestError(line, "schema_version", "expected an integer");
      h.schema_version = item.value().get<int>();
      if (h.schema_version != kManifestSchemaVersion)
        throw ManifestError(line, "schema_version",
                            "unsupported version " +
                                std::to_string(h.schema_version));
    } else {
      throw ManifestError(line, k, "unknown header field");
    }
  }
  return h;
}

bool IsHeader(const json &obj) {
  auto it = obj.find("header");
  return it != obj.end() && it->is_boolean() && it->get<bool>();
}

ordered_json SegmentToJson(const Segment &s) {
  ordered_json j;
  j["id"] = s.id;
  j["conversation_id"] = s.conversation_id;
  j["start_s"] = s.start_s;
  j["duration_s"] = s.duration_s;
  j["hypotheses"] = ordered_json::object();
  for (const auto &[sys, text] : s.hypotheses) j["hypotheses"][sys] = text;
  if (s.reference) j["reference"] = *s.reference;
  if (s.wer_vs_reference) j["wer_vs_reference"] = *s.wer_vs_reference;
  if (s.entities) {
    ordered_json arr = ordered_json::array();
    for (const auto &e : *s.entities) {
      ordered_json je;
      je["entity_class"] = e.entity_class;
      je["char_start"] = e.char_start;
      je["char_end"] = e.char_end;
      je["confidence"] = e.confidence;
      arr.push_back(std::move(je));
    }
    j["entities"] = std::move(arr);
  }
  if (s.features) {
    ordered_json jf;
    jf["acoustic_dim"] = s.features->acoustic_dim;
    jf["text_dim"] = s.features->text_dim;
    jf["values"] = s.features->values;
    j["features"] = std::move(jf);
  }
  return j;
}

}  // namespace

SegmentPool ParseManifest(const std::string &text, unsigned threads) {
  std::vector<Line> lines = SplitLines(text);
  ManifestHeader header;
  std::size_t first = 0;
  if (!lines.empty()) {
    json obj = ParseLine(lines[0]);
    if (IsHeader(obj)) {
      header = ParseHeader(obj, lines[0].number);
      first = 1;
    }
  }

  std::vector<Segment> segments(lines.size() - first);
  ParallelChunks(segments.size(), threads,
                 [&](std::size_t begin, std::size_t end) {
                   for (std::size_t i = begin; i < end; ++i) {
                     const Line &l = lines[first + i];
                     json obj = ParseLine(l);
                     if (obj.contains("header"))
                       throw ManifestError(l.number, "header",
                                           "header must be the first line");
                     segments[i] = ParseSegment(obj, l.number);
                     ValidateSegment(segments[i], header, l.number);
                   }
                 });

  std::unordered_map<std::string_view, std::size_t> seen;
  seen.reserve(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    auto [it, fresh] = seen.emplace(segments[i].id, i);
    if (!fresh)
      throw DuplicateIdError(segments[i].id, lines[first + it->second].number,
                             lines[first + i].number);
  }
  return SegmentPool(std::move(segments), std::move(header));
}

SegmentPool ReadManifest(const std::filesystem::path &path, unsigned threads) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open manifest " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseManifest(buf.str(), threads);
}

std::string SerializeManifest(const SegmentPool &pool) {
  std::string out;
  ordered_json h;
  h["header"] = true;
  if (pool.header().annotation_system)
    h["annotation_system"] = *pool.header().annotation_system;
  h["schema_version"] = pool.header().schema_version;
  out += h.dump();
  out += '\n';
  for (const auto &s : pool) {
    out += SegmentToJson(s).dump();
    out += '\n';
  }
  return out;
}

void WriteManifest(const SegmentPool &pool, const std::filesystem::path &path) {
  std::string text = SerializeManifest(pool);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace dsel
