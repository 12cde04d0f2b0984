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

#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "kmtext/error.hpp"
#include "kmtext/metrics/corpus_metric.hpp"
#include "kmtext/unicode.hpp"

namespace kmtext::metrics {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

// Longest common subsequence length, O(|a| * |b|) time, O(|b|) memory.
template <typename T>
size_t LcsLength(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<size_t> row(b.size() + 1, 0), prev(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    std::swap(row, prev);
    for (size_t j = 1; j <= b.size(); ++j) {
      row[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], row[j - 1]);
    }
  }
  return row[b.size()];
}

// Rouge-L of one pre-tokenized pair, F with beta = 1.
inline RougeScore RougeL(const std::vector<std::string>& hyp, const std::vector<std::string>& ref) {
  if (ref.empty()) throw EmptyReference("Rouge-L reference has no tokens");
  RougeScore s;
  if (hyp.empty()) return s;
  const auto lcs = static_cast<double>(LcsLength(hyp, ref));
  s.precision = lcs / static_cast<double>(hyp.size());
  s.recall = lcs / static_cast<double>(ref.size());
  if (lcs > 0) s.f = 2 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

// Mean of the per-pair scores.
inline RougeScore CorpusRougeL(const std::vector<std::vector<std::string>>& hyps,
                               const std::vector<std::vector<std::string>>& refs) {
  if (hyps.size() != refs.size()) throw LengthMismatch("Rouge-L: hypothesis/reference counts differ");
  RougeScore mean;
  if (hyps.empty()) return mean;
  for (size_t i = 0; i < hyps.size(); ++i) {
    const RougeScore s = RougeL(hyps[i], refs[i]);
    mean.precision += s.precision;
    mean.recall += s.recall;
    mean.f += s.f;
  }
  const auto n = static_cast<double>(hyps.size());
  mean.precision /= n;
  mean.recall /= n;
  mean.f /= n;
  return mean;
}

inline std::vector<std::string> SplitWhitespace(const std::string& s) {
  std::vector<std::string> out;
  std::u32string cur;
  for (char32_t c : DecodeUtf8(s)) {
    if (IsPyWhitespace(c)) {
      if (!cur.empty()) out.push_back(EncodeUtf8(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(EncodeUtf8(cur));
  return out;
}

// Rouge-L F (x100) over whitespace-tokenized strings, as a resamplable metric.
inline CorpusMetric RougeLMetric() {
  return {"rougeL",
          [](const std::string& h, const std::string& r) {
            return std::vector<double>{RougeL(SplitWhitespace(h), SplitWhitespace(r)).f, 1.0};
          },
          [](const std::vector<double>& s) { return s.empty() || s[1] == 0 ? 0.0 : 100.0 * s[0] / s[1]; }};
}

}  // namespace kmtext::metrics
