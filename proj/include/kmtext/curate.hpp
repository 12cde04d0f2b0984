// Copyright 2026 The kmtext Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Document-level quality filtering and delimiter-space repair.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kmtext/error.hpp"
#include "kmtext/normalize.hpp"
#include "kmtext/unicode.hpp"

namespace kmtext {

enum class Lang { kKm, kEn };

inline std::string_view LangCode(Lang l) { return l == Lang::kKm ? "km" : "en"; }

inline Lang ParseLang(std::string_view code) {
  if (code == "km") return Lang::kKm;
  if (code == "en") return Lang::kEn;
  throw ConfigError("unknown language tag '" + std::string(code) + "'");
}

struct Document {
  std::string id;
  std::string text;  // UTF-8
  Lang lang = Lang::kKm;
  std::string source;

  bool operator==(const Document&) const = default;
};

struct CharProfile {
  size_t n_chars = 0;
  size_t n_spaces = 0;
  size_t n_digits = 0;
  size_t n_emoji = 0;
  size_t n_punct = 0;
  size_t n_khmer = 0;
  size_t n_latin = 0;
  size_t n_other_script = 0;
  size_t max_repeat_run = 0;    // longest run of one codepoint
  size_t max_repeat_total = 0;  // most frequent codepoint's total count

  double Ratio(size_t n) const {
    return n_chars == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(n_chars);
  }

  bool operator==(const CharProfile&) const = default;
};

inline CharProfile ProfileChars(std::u32string_view text) {
  CharProfile p;
  p.n_chars = text.size();
  size_t run = 0;
  char32_t prev = 0;
  std::unordered_map<char32_t, size_t> freq;
  for (size_t i = 0; i < text.size(); ++i) {
    const char32_t c = text[i];
    run = (i > 0 && c == prev) ? run + 1 : 1;
    prev = c;
    p.max_repeat_run = std::max(p.max_repeat_run, run);
    p.max_repeat_total = std::max(p.max_repeat_total, ++freq[c]);
    switch (Classify(c)) {
      case CharClass::kSpace: ++p.n_spaces; break;
      case CharClass::kDigit: ++p.n_digits; break;
      case CharClass::kEmoji: ++p.n_emoji; break;
      case CharClass::kPunct: ++p.n_punct; break;
      case CharClass::kKhmer: ++p.n_khmer; break;
      case CharClass::kLatin: ++p.n_latin; break;
      case CharClass::kOtherLetter: ++p.n_other_script; break;
      case CharClass::kInherited:
      case CharClass::kOther: break;
    }
  }
  return p;
}

inline CharProfile ProfileChars(std::string_view utf8) {
  return ProfileChars(DecodeUtf8(utf8));
}

enum class RepeatMode { kConsecutiveRun, kTotalOccurrences };

struct FilterConfig {
  size_t min_chars = 10;
  size_t max_repeat = 20;
  double max_space_ratio = 0.30;
  double max_number_ratio = 0.20;
  double max_emoji_ratio = 0.10;
  double max_punct_ratio = 0.20;
  double max_unmatched_script_ratio = 0.05;
  double min_lang_prob = 0.50;
  double delimiter_space_ratio = 0.20;
  RepeatMode repeat_mode = RepeatMode::kConsecutiveRun;

  void Validate() const {
    const std::array<std::pair<const char*, double>, 7> ratios = {{
        {"max_space_ratio", max_space_ratio},
        {"max_number_ratio", max_number_ratio},
        {"max_emoji_ratio", max_emoji_ratio},
        {"max_punct_ratio", max_punct_ratio},
        {"max_unmatched_script_ratio", max_unmatched_script_ratio},
        {"min_lang_prob", min_lang_prob},
        {"delimiter_space_ratio", delimiter_space_ratio},
    }};
    for (const auto& [name, v] : ratios) {
      if (!(v > 0.0 && v <= 1.0)) {
        throw ConfigError(std::string(name) + " must be in (0, 1]");
      }
    }
    if (min_chars < 1) throw ConfigError("min_chars must be >= 1");
  }
};

// Rule names in evaluation order; the first that fires is reported.
inline constexpr std::array<std::string_view, 8> kFilterRules = {
    "min_chars",    "max_repeat",  "space_ratio",
    "number_ratio", "emoji_ratio", "punct_ratio",
    "unmatched_script_ratio", "lang_prob"};

struct FilterVerdict {
  bool kept = true;
  std::optional<std::string> fired_rule;
  CharProfile profile;
};

inline size_t UnmatchedScriptCount(const CharProfile& p, Lang lang) {
  const size_t foreign = lang == Lang::kKm ? p.n_latin : p.n_khmer;
  return foreign + p.n_other_script;
}

// Pure function of (profile, lang, lang_prob, cfg).
inline FilterVerdict VerdictFromProfile(const CharProfile& p, Lang lang,
                                        double lang_prob, const FilterConfig& cfg) {
  FilterVerdict v;
  v.profile = p;
  const size_t repeat = cfg.repeat_mode == RepeatMode::kConsecutiveRun
                            ? p.max_repeat_run
                            : p.max_repeat_total;
  const std::array<bool, 8> fired = {
      p.n_chars < cfg.min_chars,
      repeat > cfg.max_repeat,
      p.Ratio(p.n_spaces) > cfg.max_space_ratio,
      p.Ratio(p.n_digits) > cfg.max_number_ratio,
      p.Ratio(p.n_emoji) > cfg.max_emoji_ratio,
      p.Ratio(p.n_punct) > cfg.max_punct_ratio,
      p.Ratio(UnmatchedScriptCount(p, lang)) > cfg.max_unmatched_script_ratio,
      lang_prob < cfg.min_lang_prob,
  };
  for (size_t i = 0; i < fired.size(); ++i) {
    if (fired[i]) {
      v.kept = false;
      v.fired_rule = std::string(kFilterRules[i]);
      break;
    }
  }
  return v;
}

inline FilterVerdict ApplyFilters(const Document& doc, const FilterConfig& cfg,
                                  double lang_prob) {
  return VerdictFromProfile(ProfileChars(doc.text), doc.lang, lang_prob, cfg);
}

inline bool DetectDelimiterSpaces(std::u32string_view text, const FilterConfig& cfg = {}) {
  if (text.empty()) return false;
  const auto spaces = static_cast<double>(std::count(text.begin(), text.end(), kSpace));
  return spaces / static_cast<double>(text.size()) > cfg.delimiter_space_ratio;
}

inline bool DetectDelimiterSpaces(std::string_view utf8, const FilterConfig& cfg = {}) {
  return DetectDelimiterSpaces(DecodeUtf8(utf8), cfg);
}

inline std::u32string StripDelimiterSpaces(std::u32string_view text) {
  std::u32string out;
  out.reserve(text.size());
  for (char32_t c : text) {
    if (c != kSpace) out.push_back(c);
  }
  return out;
}

inline std::string StripDelimiterSpaces(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  for (char c : utf8) {
    if (c != ' ') out.push_back(c);
  }
  return out;
}

struct LanguageProbs {
  double km = 0.0;
  double en = 0.0;
  double other = 0.0;

  double For(Lang l) const { return l == Lang::kKm ? km : en; }
};

// Script-ratio language estimate: softmax over the Khmer, Latin and
// other-script letter fractions with temperature `temperature`.
inline LanguageProbs IdentifyLanguage(std::u32string_view text, double temperature = 0.1) {
  size_t km = 0, en = 0, other = 0;
  for (char32_t c : text) {
    switch (Classify(c)) {
      case CharClass::kKhmer: ++km; break;
      case CharClass::kLatin: ++en; break;
      case CharClass::kOtherLetter: ++other; break;
      default: break;
    }
  }
  const size_t total = km + en + other;
  if (total == 0) throw UnknownLanguage("text has no letters");
  const double t = static_cast<double>(total);
  const double s[3] = {km / t / temperature, en / t / temperature, other / t / temperature};
  const double mx = std::max({s[0], s[1], s[2]});
  const double e[3] = {std::exp(s[0] - mx), std::exp(s[1] - mx), std::exp(s[2] - mx)};
  const double z = e[0] + e[1] + e[2];
  return {e[0] / z, e[1] / z, e[2] / z};
}

inline LanguageProbs IdentifyLanguage(std::string_view utf8, double temperature = 0.1) {
  return IdentifyLanguage(DecodeUtf8(utf8), temperature);
}

// Pluggable identifier: probability that `text` is in `lang`.
using LanguageIdentifier = std::function<double(std::u32string_view text, Lang lang)>;

inline double ScriptRatioProbability(std::u32string_view text, Lang lang) {
  try {
    return IdentifyLanguage(text).For(lang);
  } catch (const UnknownLanguage&) {
    return 0.0;
  }
}

struct CleanResult {
  Document doc;           // normalized and repaired text
  FilterVerdict verdict;  // computed on the repaired text
  bool spaces_stripped = false;
};

// normalize -> delimiter-space repair (Khmer only) -> filters.
inline CleanResult CleanDocument(const Document& in, const FilterConfig& cfg,
                                 const Normalizer& normalizer = {},
                                 const LanguageIdentifier& lid = ScriptRatioProbability) {
  CleanResult r;
  r.doc = in;
  std::u32string text = normalizer(DecodeUtf8(in.text));
  if (in.lang == Lang::kKm && DetectDelimiterSpaces(text, cfg)) {
    text = StripDelimiterSpaces(text);
    r.spaces_stripped = true;
  }
  r.verdict = VerdictFromProfile(ProfileChars(text), in.lang, lid(text, in.lang), cfg);
  r.doc.text = EncodeUtf8(text);
  return r;
}

struct Rejection {
  std::string id;
  std::string fired_rule;
  CharProfile profile;
};

struct CleanStreamResult {
  std::vector<Document> kept;
  std::vector<Rejection> rejected;
  size_t spaces_stripped = 0;
};

inline CleanStreamResult CleanStream(const std::vector<Document>& docs,
                                     const FilterConfig& cfg,
                                     const Normalizer& normalizer = {},
                                     const LanguageIdentifier& lid = ScriptRatioProbability) {
  cfg.Validate();
  CleanStreamResult out;
  for (const auto& d : docs) {
    CleanResult r = CleanDocument(d, cfg, normalizer, lid);
    out.spaces_stripped += r.spaces_stripped;
    if (r.verdict.kept) {
      out.kept.push_back(std::move(r.doc));
    } else {
      out.rejected.push_back({d.id, *r.verdict.fired_rule, r.verdict.profile});
    }
  }
  return out;
}

}  // namespace kmtext
