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

// Character n-gram F-score (chrF2, nc:6, nw:0, whitespace excluded),
// computed like sacrebleu 2.x: statistics are summed over the corpus,
// precision and recall are averaged over the orders where both sides have
// n-grams, and F-beta is taken of the averages.

#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kmtext/metrics/corpus_metric.hpp"
#include "kmtext/unicode.hpp"

namespace kmtext::metrics {

struct ChrfConfig {
  int char_order = 6;
  double beta = 2.0;
  bool include_whitespace = false;
};

inline constexpr std::string_view kChrfSignature =
    "ChrF2+nrefs:1+case:mixed+eff:yes+nc:6+nw:0+space:no";

// Stats triplets per order: [hyp_count, ref_count, matches].
inline std::vector<double> ChrfSegmentStats(const std::string& hyp, const std::string& ref,
                                            const ChrfConfig& cfg = {}) {
  auto prep = [&](const std::string& s) {
    std::u32string text = DecodeUtf8(s);
    if (cfg.include_whitespace) return text;
    std::u32string out;
    for (char32_t c : text) {
      if (!IsPyWhitespace(c)) out += c;
    }
    return out;
  };
  const std::u32string h = prep(hyp), r = prep(ref);
  std::vector<double> st;
  st.reserve(3 * cfg.char_order);
  for (int n = 1; n <= cfg.char_order; ++n) {
    std::unordered_map<std::u32string, int> hc, rc;
    for (size_t i = 0; i + n <= h.size(); ++i) ++hc[h.substr(i, n)];
    for (size_t i = 0; i + n <= r.size(); ++i) ++rc[r.substr(i, n)];
    double hyp_count = 0, ref_count = 0, match = 0;
    for (const auto& [g, c] : hc) {
      hyp_count += c;
      auto it = rc.find(g);
      if (it != rc.end()) match += std::min(c, it->second);
    }
    for (const auto& [g, c] : rc) ref_count += c;
    st.push_back(rc.empty() ? 0.0 : hyp_count);
    st.push_back(ref_count);
    st.push_back(match);
  }
  return st;
}

inline double ChrfFromStats(const std::vector<double>& st, const ChrfConfig& cfg = {}) {
  const double factor = cfg.beta * cfg.beta;
  double avg_prec = 0.0, avg_rec = 0.0;
  int effective = 0;
  for (size_t i = 0; i + 2 < st.size(); i += 3) {
    const double n_hyp = st[i], n_ref = st[i + 1], n_match = st[i + 2];
    if (n_hyp > 0 && n_ref > 0) {
      avg_prec += n_match / n_hyp;
      avg_rec += n_match / n_ref;
      ++effective;
    }
  }
  if (effective == 0) return 0.0;
  avg_prec /= effective;
  avg_rec /= effective;
  if (avg_prec + avg_rec == 0.0) return 0.0;
  return 100.0 * (1 + factor) * avg_prec * avg_rec / (factor * avg_prec + avg_rec);
}

inline CorpusMetric ChrfMetric(const ChrfConfig& cfg = {}) {
  return {"chrf",
          [cfg](const std::string& h, const std::string& r) { return ChrfSegmentStats(h, r, cfg); },
          [cfg](const std::vector<double>& s) { return ChrfFromStats(s, cfg); }};
}

inline double CorpusChrf(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
                         const ChrfConfig& cfg = {}) {
  return ChrfMetric(cfg).Score(hyps, refs);
}

}  // namespace kmtext::metrics
