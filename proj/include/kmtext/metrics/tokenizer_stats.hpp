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

// Tokenizer efficiency: fertility and average length ratio.

#pragma once

#include <string>
#include <vector>

#include "kmtext/segment.hpp"
#include "kmtext/subword.hpp"
#include "kmtext/unicode.hpp"

namespace kmtext::metrics {

// Mean number of pieces per chunk.
inline double Fertility(const std::vector<std::vector<int>>& encoded_chunks) {
  if (encoded_chunks.empty()) return 0.0;
  double total = 0.0;
  for (const auto& c : encoded_chunks) total += static_cast<double>(c.size());
  return total / static_cast<double>(encoded_chunks.size());
}

// Splits a token sequence into phrases at functional spaces.
inline std::vector<std::vector<Token>> Phrases(const std::vector<Token>& tokens) {
  std::vector<std::vector<Token>> out(1);
  for (const auto& t : tokens) {
    if (t.IsSpace()) {
      if (!out.back().empty()) out.emplace_back();
    } else {
      out.back().push_back(t);
    }
  }
  if (out.back().empty()) out.pop_back();
  return out;
}

// Encodes every phrase of every document and returns the fertility.
inline double PhraseFertility(const std::vector<std::vector<Token>>& docs, const SubwordVocab& vocab) {
  std::vector<std::vector<int>> encoded;
  for (const auto& d : docs) {
    for (const auto& p : Phrases(d)) encoded.push_back(vocab.Encode(p));
  }
  return Fertility(encoded);
}

struct LengthCounts {
  size_t pieces = 0;      // excluding the space piece
  size_t characters = 0;  // excluding U+0020

  double Ratio() const {
    return characters == 0 ? 0.0 : static_cast<double>(pieces) / static_cast<double>(characters);
  }
};

inline LengthCounts CountLengths(const std::string& text, const std::vector<int>& ids,
                                 const SubwordVocab& vocab) {
  LengthCounts c;
  for (char32_t ch : DecodeUtf8(text)) c.characters += ch != kSpace;
  for (int id : ids) c.pieces += id != vocab.space_id();
  return c;
}

inline double LengthRatio(const std::vector<LengthCounts>& parts) {
  LengthCounts total;
  for (const auto& p : parts) {
    total.pieces += p.pieces;
    total.characters += p.characters;
  }
  return total.Ratio();
}

}  // namespace kmtext::metrics
