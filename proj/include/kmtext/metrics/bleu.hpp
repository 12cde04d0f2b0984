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

// Corpus BLEU with the 13a tokenizer and exponential smoothing. Results
// agree with sacrebleu's BLEU+nrefs:1+case:mixed+eff:no+tok:13a+smooth:exp.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kmtext/error.hpp"
#include "kmtext/metrics/corpus_metric.hpp"
#include "kmtext/unicode.hpp"

namespace kmtext::metrics {

inline constexpr int kBleuOrder = 4;
inline constexpr std::string_view kBleuSignature =
    "BLEU+nrefs:1+case:mixed+eff:no+tok:13a+smooth:exp";

namespace internal {

inline bool Is13aSymbol(char32_t c) {
  return (c >= 0x7B && c <= 0x7E) || (c >= 0x5B && c <= 0x60) || (c >= 0x20 && c <= 0x26) ||
         (c >= 0x28 && c <= 0x2B) || (c >= 0x3A && c <= 0x40) || c == U'/';
}

inline bool IsAsciiDigit(char32_t c) { return c >= U'0' && c <= U'9'; }
inline bool IsPeriodComma(char32_t c) { return c == U'.' || c == U','; }

inline void ReplaceAll(std::u32string* s, std::u32string_view from, std::u32string_view to) {
  std::u32string out;
  size_t i = 0;
  while (i < s->size()) {
    if (s->compare(i, from.size(), from) == 0) {
      out += to;
      i += from.size();
    } else {
      out += (*s)[i++];
    }
  }
  *s = std::move(out);
}

// Left-to-right, non-overlapping application of a two-character pattern,
// mirroring re.sub.
template <typename Match, typename Emit>
std::u32string SubPairs(const std::u32string& s, Match match, Emit emit) {
  std::u32string out;
  size_t i = 0;
  while (i < s.size()) {
    if (i + 1 < s.size() && match(s[i], s[i + 1])) {
      emit(s[i], s[i + 1], &out);
      i += 2;
    } else {
      out += s[i++];
    }
  }
  return out;
}

inline std::vector<std::u32string> PySplit(std::u32string_view s) {
  std::vector<std::u32string> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && IsPyWhitespace(s[i])) ++i;
    size_t j = i;
    while (j < s.size() && !IsPyWhitespace(s[j])) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace internal

// mteval-v13a tokenization; returns the tokens.
inline std::vector<std::u32string> Tokenize13a(std::string_view utf8) {
  using namespace internal;
  std::u32string s = DecodeUtf8(utf8);
  while (!s.empty() && IsPyWhitespace(s.back())) s.pop_back();
  ReplaceAll(&s, U"<skipped>", U"");
  ReplaceAll(&s, U"-\n", U"");
  ReplaceAll(&s, U"\n", U" ");
  if (s.find(U'&') != std::u32string::npos) {
    ReplaceAll(&s, U"&quot;", U"\"");
    ReplaceAll(&s, U"&amp;", U"&");
    ReplaceAll(&s, U"&lt;", U"<");
    ReplaceAll(&s, U"&gt;", U">");
  }
  std::u32string t = U" " + s + U" ";
  std::u32string a;
  for (char32_t c : t) {
    if (Is13aSymbol(c)) {
      a += U' ';
      a += c;
      a += U' ';
    } else {
      a += c;
    }
  }
  a = SubPairs(
      a, [](char32_t x, char32_t y) { return !IsAsciiDigit(x) && IsPeriodComma(y); },
      [](char32_t x, char32_t y, std::u32string* o) { *o += x; *o += U' '; *o += y; *o += U' '; });
  a = SubPairs(
      a, [](char32_t x, char32_t y) { return IsPeriodComma(x) && !IsAsciiDigit(y); },
      [](char32_t x, char32_t y, std::u32string* o) { *o += U' '; *o += x; *o += U' '; *o += y; });
  a = SubPairs(
      a, [](char32_t x, char32_t y) { return IsAsciiDigit(x) && y == U'-'; },
      [](char32_t x, char32_t y, std::u32string* o) { *o += x; *o += U' '; *o += y; *o += U' '; });
  return PySplit(a);
}

// Segment statistics: [hyp_len, ref_len, correct_1..4, total_1..4].
inline std::vector<double> BleuSegmentStats(const std::string& hyp, const std::string& ref) {
  const auto h = Tokenize13a(hyp);
  const auto r = Tokenize13a(ref);
  std::vector<double> st(2 + 2 * kBleuOrder, 0.0);
  st[0] = static_cast<double>(h.size());
  st[1] = static_cast<double>(r.size());
  for (int n = 1; n <= kBleuOrder; ++n) {
    std::map<std::vector<std::u32string>, int> ref_counts, hyp_counts;
    for (size_t i = 0; i + n <= r.size(); ++i) ++ref_counts[{r.begin() + i, r.begin() + i + n}];
    for (size_t i = 0; i + n <= h.size(); ++i) ++hyp_counts[{h.begin() + i, h.begin() + i + n}];
    double correct = 0, total = 0;
    for (const auto& [g, c] : hyp_counts) {
      total += c;
      auto it = ref_counts.find(g);
      if (it != ref_counts.end()) correct += std::min(c, it->second);
    }
    st[1 + n] = correct;
    st[1 + kBleuOrder + n] = total;
  }
  return st;
}

struct BleuScore {
  double score = 0.0;
  std::array<double, kBleuOrder> precisions{};
  double bp = 0.0;
  double sys_len = 0.0;
  double ref_len = 0.0;
};

inline BleuScore BleuFromStats(const std::vector<double>& st) {
  BleuScore out;
  if (st.empty()) return out;
  out.sys_len = st[0];
  out.ref_len = st[1];
  if (out.sys_len < out.ref_len) {
    out.bp = out.sys_len > 0 ? std::exp(1.0 - out.ref_len / out.sys_len) : 0.0;
  } else {
    out.bp = 1.0;
  }
  const double* correct = &st[2];
  const double* total = &st[2 + kBleuOrder];
  if (std::all_of(correct, correct + kBleuOrder, [](double c) { return c == 0; })) return out;
  double smooth = 1.0;
  for (int n = 0; n < kBleuOrder; ++n) {
    if (total[n] == 0) break;
    if (correct[n] == 0) {
      smooth *= 2;
      out.precisions[n] = 100.0 / (smooth * total[n]);
    } else {
      out.precisions[n] = 100.0 * correct[n] / total[n];
    }
  }
  double log_sum = 0.0;
  for (double p : out.precisions) log_sum += p == 0.0 ? -9999999999.0 : std::log(p);
  out.score = out.bp * std::exp(log_sum / kBleuOrder);
  return out;
}

inline CorpusMetric BleuMetric() {
  return {"bleu", BleuSegmentStats,
          [](const std::vector<double>& s) { return BleuFromStats(s).score; }};
}

inline BleuScore CorpusBleu(const std::vector<std::string>& hyps,
                            const std::vector<std::string>& refs) {
  const auto all = BleuMetric().AllStats(hyps, refs);
  std::vector<double> sum(2 + 2 * kBleuOrder, 0.0);
  for (const auto& s : all) {
    for (size_t k = 0; k < s.size(); ++k) sum[k] += s[k];
  }
  return BleuFromStats(sum);
}

}  // namespace kmtext::metrics
