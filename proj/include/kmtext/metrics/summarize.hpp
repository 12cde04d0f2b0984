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

// Extractive summarization baselines.

#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "kmtext/error.hpp"
#include "kmtext/metrics/rouge.hpp"

namespace kmtext::metrics {

// First min(3, n) sentences, concatenated. Sentences from SplitSentences()
// carry their own spacing.
inline std::string Lead3(const std::vector<std::string>& sentences) {
  std::string out;
  for (size_t i = 0; i < std::min<size_t>(3, sentences.size()); ++i) out += sentences[i];
  return out;
}

// Index of the sentence with the highest Rouge-L F against the reference;
// the earliest wins ties.
inline size_t OracleSentence(const std::vector<std::vector<std::string>>& sentences,
                             const std::vector<std::string>& ref) {
  if (sentences.empty()) throw EmptyArticle("oracle needs at least one sentence");
  size_t best = 0;
  double best_f = -1.0;
  for (size_t i = 0; i < sentences.size(); ++i) {
    const double f = RougeL(sentences[i], ref).f;
    if (f > best_f) {
      best_f = f;
      best = i;
    }
  }
  return best;
}

}  // namespace kmtext::metrics
