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

// Functional-space generation quality: a metric scored with and without
// functional spaces.
//
// Both sides are normalized and word-segmented. S_all scores the tokens
// joined by U+0020 with every functional space rendered as U+2581; S_content
// scores the same tokens with the functional spaces removed.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kmtext/metrics/corpus_metric.hpp"
#include "kmtext/normalize.hpp"
#include "kmtext/segment.hpp"

namespace kmtext::metrics {

inline constexpr std::string_view kVisibleSpace = "▁";

struct EvalReport {
  std::string metric_name;
  double s_content = 0.0;
  double s_all = 0.0;
  double delta_s = 0.0;
  std::optional<double> p_value;
};

inline std::string RenderWithSpaces(const std::vector<Token>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t.IsSpace() ? std::string(kVisibleSpace) : t.surface;
  }
  return out;
}

inline std::string RenderContent(const std::vector<Token>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (t.IsSpace()) continue;
    if (!out.empty()) out += ' ';
    out += t.surface;
  }
  return out;
}

struct EvalViews {
  std::vector<std::string> all;
  std::vector<std::string> content;
};

inline EvalViews PrepareForEval(const std::vector<std::string>& raw, const Lexicon& lex,
                                const Normalizer& normalizer = {}) {
  EvalViews v;
  for (const auto& line : raw) {
    const auto tokens = SegmentWords(normalizer(DecodeUtf8(line)), lex);
    v.all.push_back(RenderWithSpaces(tokens));
    v.content.push_back(RenderContent(tokens));
  }
  return v;
}

inline EvalReport DeltaS(const std::vector<std::string>& hyps_raw,
                         const std::vector<std::string>& refs_raw, const CorpusMetric& metric,
                         const Lexicon& lex, const Normalizer& normalizer = {}) {
  if (hyps_raw.size() != refs_raw.size()) {
    throw LengthMismatch("delta_s: hypothesis/reference counts differ");
  }
  const EvalViews h = PrepareForEval(hyps_raw, lex, normalizer);
  const EvalViews r = PrepareForEval(refs_raw, lex, normalizer);
  EvalReport rep;
  rep.metric_name = metric.name;
  rep.s_all = metric.Score(h.all, r.all);
  rep.s_content = metric.Score(h.content, r.content);
  rep.delta_s = rep.s_all - rep.s_content;
  return rep;
}

}  // namespace kmtext::metrics
