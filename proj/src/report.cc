// report.cc

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

#include "dsel/report.h"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace dsel {

using nlohmann::ordered_json;

DistributionReport RenderDistributionReport(
    const SegmentPool &pool, const EntityClassStats &total,
    const std::vector<std::pair<std::string, SelectionResult>> &selections,
    ConfidenceAggregation agg) {
  DistributionReport out;
  out.total = total;
  for (const auto &[label, sel] : selections) {
    SegmentPool chosen = pool.Subset(sel.selected_ids);
    DistributionBar bar;
    bar.label = label;
    for (const auto &s : chosen) bar.realized_duration_s += s.duration_s;
    SegmentPool ner = FilterEntitySegments(chosen);
    bar.non_entity_s = bar.realized_duration_s - ner.total_duration_s();
    if (!ner.empty()) bar.stats = ClassStatsOf(ner, agg);
    for (const auto &[cls, _] : total.classes) bar.stats.classes.try_emplace(cls);
    out.bars.push_back(std::move(bar));
  }
  return out;
}

ordered_json ToJson(const DistributionReport &d) {
  ordered_json j;
  j["total"] = ToJson(d.total);
  ordered_json bars = ordered_json::array();
  for (const auto &b : d.bars) {
    ordered_json jb;
    jb["label"] = b.label;
    jb["realized_duration_s"] = b.realized_duration_s;
    jb["non_entity_s"] = b.non_entity_s;
    jb["stats"] = ToJson(b.stats);
    bars.push_back(std::move(jb));
  }
  j["bars"] = std::move(bars);
  return j;
}

DistributionReport DistributionReportFromJson(const ordered_json &j) {
  DistributionReport d;
  d.total = EntityClassStatsFromJson(j.at("total"));
  for (const auto &jb : j.at("bars")) {
    DistributionBar b;
    b.label = jb.at("label").get<std::string>();
    b.realized_duration_s = jb.at("realized_duration_s").get<double>();
    b.non_entity_s = jb.at("non_entity_s").get<double>();
    b.stats = EntityClassStatsFromJson(jb.at("stats"));
    d.bars.push_back(std::move(b));
  }
  return d;
}

ordered_json ToJson(const RunReport &r) {
  ordered_json j;
  j["toolkit_version"] = r.toolkit_version;
  j["command"] = r.command;
  j["manifest"] = {{"digest", r.manifest_digest},
                   {"segments", r.manifest_segments},
                   {"duration_s", r.manifest_duration_s}};
  j["config"] = r.config;
  if (r.selection) j["selection"] = ToJson(*r.selection);
  if (r.entity_stats) j["entity_stats"] = ToJson(*r.entity_stats);
  if (r.distribution) j["distribution"] = ToJson(*r.distribution);
  if (r.cer_histogram) j["cer_histogram"] = ToJson(*r.cer_histogram);
  if (r.classification) j["classification"] = ToJson(*r.classification);
  if (r.wall_clock_s) j["wall_clock_s"] = *r.wall_clock_s;
  return j;
}

RunReport RunReportFromJson(const ordered_json &j) {
  RunReport r;
  r.toolkit_version = j.at("toolkit_version").get<std::string>();
  r.command = j.at("command").get<std::string>();
  const auto &m = j.at("manifest");
  r.manifest_digest = m.at("digest").get<std::string>();
  r.manifest_segments = m.at("segments").get<std::size_t>();
  r.manifest_duration_s = m.at("duration_s").get<double>();
  r.config = j.at("config");
  if (j.contains("selection"))
    r.selection = SelectionResultFromJson(j.at("selection"));
  if (j.contains("entity_stats"))
    r.entity_stats = EntityClassStatsFromJson(j.at("entity_stats"));
  if (j.contains("distribution"))
    r.distribution = DistributionReportFromJson(j.at("distribution"));
  if (j.contains("cer_histogram"))
    r.cer_histogram = CerHistogramFromJson(j.at("cer_histogram"));
  if (j.contains("classification"))
    r.classification = ClassificationReportFromJson(j.at("classification"));
  if (j.contains("wall_clock_s"))
    r.wall_clock_s = j.at("wall_clock_s").get<double>();
  return r;
}

namespace {

std::string Fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Column-aligned table: first column left-aligned, the rest right-aligned.
class Table {
 public:
  explicit Table(std::vector<std::string> header) {
    rows_.push_back(std::move(header));
  }
  void Add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  std::string Render(const std::string &indent = "") const {
    std::vector<std::size_t> width;
    for (const auto &row : rows_) {
      if (width.size() < row.size()) width.resize(row.size(), 0);
      for (std::size_t c = 0; c < row.size(); ++c)
        width[c] = std::max(width[c], row[c].size());
    }
    std::string out;
    for (const auto &row : rows_) {
      std::string line = indent;
      for (std::size_t c = 0; c < row.size(); ++c) {
        std::string pad(width[c] - row[c].size(), ' ');
        if (c > 0) line += "  ";
        line += c == 0 ? row[c] + pad : pad + row[c];
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      out += line + '\n';
    }
    return out;
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

std::string Title(const std::string &t) {
  return t + '\n' + std::string(t.size(), '-') + '\n';
}

std::string KeyValue(const std::string &k, const std::string &v) {
  std::string key = k;
  if (key.size() < 20) key.resize(20, ' ');
  return key + " " + v + '\n';
}

std::string ClassStatsTable(const EntityClassStats &st,
                            const std::string &indent) {
  Table t({"class", "segments", "duration_s", "share", "low_s", "mid_s",
           "high_s"});
  for (const auto &[cls, c] : st.classes)
    t.Add({cls, std::to_string(c.segment_count), Fixed(c.duration_s),
           Fixed(c.share, 4), Fixed(c.low_s), Fixed(c.mid_s),
           Fixed(c.high_s)});
  return t.Render(indent);
}

}  // namespace

std::string RenderTextTables(const RunReport &r) {
  std::ostringstream out;
  out << "dsel run report\n===============\n";
  out << KeyValue("toolkit", r.toolkit_version);
  out << KeyValue("command", r.command);
  out << KeyValue("manifest", r.manifest_digest);
  out << KeyValue("manifest segments", std::to_string(r.manifest_segments));
  out << KeyValue("manifest duration",
                  Fixed(r.manifest_duration_s) + " s (" +
                      Fixed(r.manifest_duration_s / 3600.0) + " h)");
  if (r.wall_clock_s) out << KeyValue("wall clock", Fixed(*r.wall_clock_s) + " s");

  if (!r.config.empty()) {
    out << '\n' << Title("Configuration");
    for (const auto &item : r.config.items())
      out << KeyValue(item.key(), item.value().is_string()
                                      ? item.value().get<std::string>()
                                      : item.value().dump());
  }

  if (r.selection) {
    const SelectionResult &s = *r.selection;
    out << '\n' << Title("Selection");
    out << KeyValue("strategy", std::string(StrategyName(s.strategy)));
    out << KeyValue("seed", std::to_string(s.seed));
    out << KeyValue("rng", s.rng_algorithm);
    std::string streams;
    for (const auto &l : s.rng_streams) streams += (streams.empty() ? "" : " ") + l;
    if (!streams.empty()) out << KeyValue("rng streams", streams);
    out << KeyValue("budget", Fixed(s.budget_s) + " s (" +
                                  Fixed(s.budget_s / 3600.0) + " h)");
    out << KeyValue("realized", Fixed(s.realized_duration_s) + " s (" +
                                    Fixed(s.realized_duration_s / 3600.0) +
                                    " h)");
    out << KeyValue("selected segments", std::to_string(s.selected_ids.size()));
    out << KeyValue("saturated", s.saturated ? "yes" : "no");
    for (const auto &w : s.warnings) out << KeyValue("warning", w);
    if (s.stats.contains("classes")) {
      Table t({"class", "share", "target_s", "available_s", "selected_s",
               "shortfall_s"});
      for (const auto &c : s.stats.at("classes"))
        t.Add({c.at("entity_class").get<std::string>(),
               Fixed(c.at("share").get<double>(), 4),
               Fixed(c.at("target_s").get<double>()),
               Fixed(c.at("available_s").get<double>()),
               Fixed(c.at("selected_s").get<double>()),
               Fixed(c.at("shortfall_s").get<double>())});
      out << "per-class budgets\n" << t.Render("  ");
    }
  }

  if (r.entity_stats) {
    out << '\n' << Title("Entity classes");
    out << KeyValue("entity segments",
                    std::to_string(r.entity_stats->segment_count));
    out << KeyValue("entity duration",
                    Fixed(r.entity_stats->segment_duration_s) + " s");
    out << ClassStatsTable(*r.entity_stats, "");
  }

  if (r.distribution) {
    out << '\n' << Title("Entity class distribution by selection");
    for (const auto &b : r.distribution->bars) {
      out << b.label << ": realized " << Fixed(b.realized_duration_s)
          << " s, without entities " << Fixed(b.non_entity_s) << " s\n";
      out << ClassStatsTable(b.stats, "  ");
    }
  }

  if (r.cer_histogram) {
    const CerHistogram &h = *r.cer_histogram;
    out << '\n' << Title("Average CER histogram");
    out << KeyValue("bin width", Fixed(h.bin_width, 4));
    out << KeyValue("scored duration", Fixed(h.total_duration_s) + " s");
    Table t({"bin", "segments", "duration_s", "fraction"});
    for (std::size_t b = 0; b < h.bins.size(); ++b) {
      const auto &bin = h.bins[b];
      std::string label = "[" + Fixed(bin.lo, 2) + ", " + Fixed(bin.hi, 2) +
                          (b + 1 == h.bins.size() ? "]" : ")");
      t.Add({label, std::to_string(bin.count), Fixed(bin.duration_s),
             Fixed(h.Fraction(b), 4)});
    }
    out << t.Render();
  }

  if (r.classification) {
    const ClassificationReport &c = *r.classification;
    out << '\n' << Title("WER classification");
    Table t({"class", "precision", "recall", "f1", "support"});
    t.Add({"low_wer", Fixed(c.low_wer.precision, 4), Fixed(c.low_wer.recall, 4),
           Fixed(c.low_wer.f1, 4), std::to_string(c.low_wer.support)});
    t.Add({"high_wer", Fixed(c.high_wer.precision, 4),
           Fixed(c.high_wer.recall, 4), Fixed(c.high_wer.f1, 4),
           std::to_string(c.high_wer.support)});
    out << t.Render();
    out << KeyValue("accuracy", Fixed(c.accuracy, 4));
    Table cm({"truth \\ predicted", "low_wer", "high_wer"});
    cm.Add({"low_wer", std::to_string(c.confusion.low_as_low),
            std::to_string(c.confusion.low_as_high)});
    cm.Add({"high_wer", std::to_string(c.confusion.high_as_low),
            std::to_string(c.confusion.high_as_high)});
    out << cm.Render();
  }
  return out.str();
}

void WriteRunReport(const RunReport &r, const std::filesystem::path &dir) {
  auto write = [](const std::filesystem::path &p, const std::string &text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + p.string() + " for writing");
    out << text;
    out.close();
    if (!out) throw Error("failed writing " + p.string());
  };
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
  write(dir / "report.json", ToJson(r).dump(2) + "\n");
  write(dir / "report.txt", RenderTextTables(r));
}

std::string Sha256Hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  static const char *kHex = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[md[i] >> 4]);
    hex.push_back(kHex[md[i] & 0xF]);
  }
  return hex;
}

std::string FileDigest(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return "sha256:" + Sha256Hex(buf.str());
}

}  // namespace dsel
