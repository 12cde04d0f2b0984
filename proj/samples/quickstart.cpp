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

// Normalizes, segments, tokenizes and noises one short Khmer document.

#include <fstream>
#include <iostream>

#include "kmtext/kmtext.hpp"

int main() {
  std::ifstream lex_in(KMTEXT_DATA_DIR "/khmer_lexicon.tsv");
  const kmtext::Lexicon lex = kmtext::Lexicon::Parse(lex_in);

  // Zero-width space and a split vowel, both repaired by normalization.
  const std::string raw =
      "ខ្ញុំ​មានបំណងទៅភ្នំពេញ។ យើងរៀនភាសាខ្មែរនៅសាលា។ គេី";
  const std::string text = kmtext::Normalize(raw);
  const auto tokens = kmtext::SegmentWords(text, lex);
  std::cout << "segmented: " << kmtext::JoinPresegmented(tokens) << "\n";

  kmtext::UnitCorpus corpus;
  for (int i = 0; i < 20; ++i) corpus.AddTokens(tokens, kmtext::TokenizerMode::kWordSegmented);
  kmtext::TrainerConfig tc;
  tc.target_size = 40;
  const kmtext::SubwordVocab vocab = kmtext::TrainUnigram(corpus, tc);
  const auto ids = vocab.Encode(tokens);
  std::cout << "pieces: " << ids.size() << ", round trip ok: " << (vocab.Decode(ids) == text) << "\n";

  kmtext::NoiseConfig nc;
  nc.rng_seed = 7;
  for (const auto& pair : kmtext::MakePairs("doc-1", kmtext::Lang::kKm, tokens, vocab, nc)) {
    std::cout << "pair " << pair.chunk_index << ": " << pair.source_ids.size() << " source ids, "
              << pair.target_ids.size() << " target ids\n";
  }
  return 0;
}
