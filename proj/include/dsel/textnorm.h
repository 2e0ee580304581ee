// dsel/textnorm.h

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

#ifndef DSEL_TEXTNORM_H_
#define DSEL_TEXTNORM_H_

// Transcript normalization and word/character error-rate kernels.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dsel {

struct NormalizationConfig {
  bool lowercase = true;
  // Punctuation becomes a space; apostrophes between two word characters
  // ("don't") are kept.
  bool strip_punctuation = true;
  bool collapse_whitespace = true;
  // Character tokenization for CER drops spaces unless this is set.
  bool cer_include_spaces = false;

  bool operator==(const NormalizationConfig &) const = default;
};

// UTF-8 <-> code points.  Malformed bytes decode to U+FFFD.
std::u32string DecodeUtf8(std::string_view text);
std::string EncodeUtf8(std::u32string_view text);
std::size_t Utf8Length(std::string_view text);

// Always trims leading/trailing whitespace.  Idempotent.
std::string Normalize(std::string_view text, const NormalizationConfig &cfg);

// Whitespace-separated words of already-normalized text.
std::vector<std::string> Words(std::string_view normalized);
// Code points of already-normalized text, without spaces unless
// cfg.cer_include_spaces.
std::u32string Chars(std::string_view normalized,
                     const NormalizationConfig &cfg);

// Unit-cost edit distance (insert/delete/substitute, no transpositions).
// Common prefix and suffix are stripped before the two-row DP; the result is
// identical to the full table.
template <typename T>
std::size_t Levenshtein(std::span<const T> a, std::span<const T> b) {
  while (!a.empty() && !b.empty() && a.front() == b.front()) {
    a = a.subspan(1);
    b = b.subspan(1);
  }
  while (!a.empty() && !b.empty() && a.back() == b.back()) {
    a = a.first(a.size() - 1);
    b = b.first(b.size() - 1);
  }
  if (a.size() < b.size()) std::swap(a, b);
  if (b.empty()) return a.size();

  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

template <typename Seq>
std::size_t Levenshtein(const Seq &a, const Seq &b) {
  using T = typename Seq::value_type;
  return Levenshtein<T>(std::span<const T>(a.data(), a.size()),
                        std::span<const T>(b.data(), b.size()));
}

struct WerResult {
  double wer = 0.0;
  std::size_t errors = 0;
  std::size_t ref_words = 0;
  std::size_t hyp_words = 0;
  // Empty reference with non-empty hypothesis: wer is errors / 1.
  bool degenerate = false;
};

WerResult Wer(std::string_view reference, std::string_view hypothesis,
              const NormalizationConfig &cfg = {});

// Symmetric CER between two hypotheses, normalized by the longer string.
// Always in [0, 1]; two empty strings score 0.
double CerPair(std::string_view a, std::string_view b,
               const NormalizationConfig &cfg = {});

struct PairCer {
  std::string system_a;  // system_a < system_b
  std::string system_b;
  double cer = 0.0;

  bool operator==(const PairCer &) const = default;
};

struct CerAverage {
  std::vector<PairCer> pairs;  // all C(k,2) unordered pairs, sorted
  double average = 0.0;
};

// Mean of CerPair over every unordered pair of systems.  Throws
// InsufficientHypothesesError (mentioning segment_id) for fewer than two.
CerAverage CerAvgDetailed(const std::map<std::string, std::string> &hypotheses,
                          const NormalizationConfig &cfg = {},
                          std::string_view segment_id = {});
double CerAvg(const std::map<std::string, std::string> &hypotheses,
              const NormalizationConfig &cfg = {},
              std::string_view segment_id = {});

}  // namespace dsel

#endif  // DSEL_TEXTNORM_H_
