// textnorm.cc

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

#include "dsel/textnorm.h"

#include "dsel/error.h"

namespace dsel {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

bool IsSpace(char32_t c) {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 ||
         c == 0x1680 || (c >= 0x2000 && c <= 0x200A) || c == 0x2028 ||
         c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000;
}

bool IsApostrophe(char32_t c) { return c == U'\'' || c == 0x2019; }

// ASCII punctuation and symbols, the Latin-1 and General Punctuation blocks,
// CJK and fullwidth punctuation.
bool IsPunct(char32_t c) {
  if (c < 0x80)
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
           (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
  if (c <= 0xFF)
    return (c >= 0xA1 && c <= 0xA9) || (c >= 0xAB && c <= 0xB4) ||
           (c >= 0xB6 && c <= 0xB8) || c == 0xBB || c == 0xBF || c == 0xD7 ||
           c == 0xF7;
  return (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) ||
         (c >= 0x3001 && c <= 0x3003) || (c >= 0x3008 && c <= 0x3011) ||
         (c >= 0x3014 && c <= 0x301F) || (c >= 0xFF01 && c <= 0xFF0F) ||
         (c >= 0xFF1A && c <= 0xFF20) || (c >= 0xFF3B && c <= 0xFF40) ||
         (c >= 0xFF5B && c <= 0xFF65);
}

bool IsWordChar(char32_t c) { return !IsSpace(c) && !IsPunct(c); }

// Simple case mapping for Latin, Greek and Cyrillic capitals.
char32_t ToLower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 0x20;
  if (c < 0xC0) return c;
  if (c <= 0xDE) return c == 0xD7 ? c : c + 0x20;
  if (c >= 0x100 && c <= 0x17F) {
    if (c == 0x130 || c == 0x131 || c == 0x138 || c == 0x149 || c == 0x17F)
      return c;
    if (c == 0x178) return 0xFF;
    bool odd_upper = (c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E);
    bool is_upper = odd_upper ? (c % 2 == 1) : (c % 2 == 0);
    return is_upper ? c + 1 : c;
  }
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 0x20;
  if (c >= 0x410 && c <= 0x42F) return c + 0x20;
  if (c >= 0x400 && c <= 0x40F) return c + 0x50;
  return c;
}

}  // namespace

std::u32string DecodeUtf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0, n = text.size();
  while (i < n) {
    auto b0 = static_cast<unsigned char>(text[i]);
    std::size_t len;
    char32_t cp;
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    if (i + len > n) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (!ok || cp < kMin[len] || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string EncodeUtf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) {
    if (c > 0x10FFFF || (c >= 0xD800 && c <= 0xDFFF)) c = kReplacement;
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (c >> 18)));
      out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

std::size_t Utf8Length(std::string_view text) {
  return DecodeUtf8(text).size();
}

std::string Normalize(std::string_view text, const NormalizationConfig &cfg) {
  std::u32string cps = DecodeUtf8(text);
  if (cfg.lowercase)
    for (auto &c : cps) c = ToLower(c);

  if (cfg.strip_punctuation) {
    std::u32string kept;
    kept.reserve(cps.size());
    for (std::size_t i = 0; i < cps.size(); ++i) {
      char32_t c = cps[i];
      if (IsApostrophe(c)) {
        bool inner = i > 0 && i + 1 < cps.size() && IsWordChar(cps[i - 1]) &&
                     IsWordChar(cps[i + 1]);
        kept.push_back(inner ? U'\'' : U' ');
      } else if (IsPunct(c)) {
        kept.push_back(U' ');
      } else {
        kept.push_back(c);
      }
    }
    cps.swap(kept);
  }

  std::u32string out;
  out.reserve(cps.size());
  if (cfg.collapse_whitespace) {
    bool pending_space = false;
    for (char32_t c : cps) {
      if (IsSpace(c)) {
        pending_space = !out.empty();
      } else {
        if (pending_space) out.push_back(U' ');
        pending_space = false;
        out.push_back(c);
      }
    }
  } else {
    std::size_t b = 0, e = cps.size();
    while (b < e && IsSpace(cps[b])) ++b;
    while (e > b && IsSpace(cps[e - 1])) --e;
    out.assign(cps.begin() + b, cps.begin() + e);
  }
  return EncodeUtf8(out);
}

std::vector<std::string> Words(std::string_view normalized) {
  std::vector<std::string> words;
  std::u32string current;
  for (char32_t c : DecodeUtf8(normalized)) {
    if (IsSpace(c)) {
      if (!current.empty()) words.push_back(EncodeUtf8(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) words.push_back(EncodeUtf8(current));
  return words;
}

std::u32string Chars(std::string_view normalized,
                     const NormalizationConfig &cfg) {
  std::u32string cps = DecodeUtf8(normalized);
  if (cfg.cer_include_spaces) return cps;
  std::erase_if(cps, IsSpace);
  return cps;
}

WerResult Wer(std::string_view reference, std::string_view hypothesis,
              const NormalizationConfig &cfg) {
  auto ref = Words(Normalize(reference, cfg));
  auto hyp = Words(Normalize(hypothesis, cfg));
  WerResult r;
  r.ref_words = ref.size();
  r.hyp_words = hyp.size();
  r.errors = Levenshtein(ref, hyp);
  r.degenerate = ref.empty() && !hyp.empty();
  r.wer = static_cast<double>(r.errors) /
          static_cast<double>(std::max<std::size_t>(1, ref.size()));
  return r;
}

double CerPair(std::string_view a, std::string_view b,
               const NormalizationConfig &cfg) {
  auto ca = Chars(Normalize(a, cfg), cfg);
  auto cb = Chars(Normalize(b, cfg), cfg);
  std::size_t denom = std::max<std::size_t>({1, ca.size(), cb.size()});
  return static_cast<double>(Levenshtein(ca, cb)) /
         static_cast<double>(denom);
}

CerAverage CerAvgDetailed(const std::map<std::string, std::string> &hypotheses,
                          const NormalizationConfig &cfg,
                          std::string_view segment_id) {
  if (hypotheses.size() < 2) {
    std::string msg = "need at least 2 hypotheses for average CER, got " +
                      std::to_string(hypotheses.size());
    if (!segment_id.empty())
      msg = "segment '" + std::string(segment_id) + "': " + msg;
    throw InsufficientHypothesesError(msg);
  }
  // Normalize each hypothesis once; every system takes part in k-1 pairs.
  std::vector<std::pair<const std::string *, std::u32string>> chars;
  chars.reserve(hypotheses.size());
  for (const auto &[system, text] : hypotheses)
    chars.emplace_back(&system, Chars(Normalize(text, cfg), cfg));

  CerAverage out;
  double sum = 0.0;
  for (std::size_t i = 0; i < chars.size(); ++i) {
    for (std::size_t j = i + 1; j < chars.size(); ++j) {
      const auto &a = chars[i].second, &b = chars[j].second;
      std::size_t denom = std::max<std::size_t>({1, a.size(), b.size()});
      double cer = static_cast<double>(Levenshtein(a, b)) /
                   static_cast<double>(denom);
      out.pairs.push_back({*chars[i].first, *chars[j].first, cer});
      sum += cer;
    }
  }
  out.average = sum / static_cast<double>(out.pairs.size());
  return out;
}

double CerAvg(const std::map<std::string, std::string> &hypotheses,
              const NormalizationConfig &cfg, std::string_view segment_id) {
  return CerAvgDetailed(hypotheses, cfg, segment_id).average;
}

}  // namespace dsel
