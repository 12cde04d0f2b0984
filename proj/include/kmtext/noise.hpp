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

// Denoising pair generation: sentence-aligned chunking and Poisson span
// masking over word tokens.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "kmtext/curate.hpp"
#include "kmtext/error.hpp"
#include "kmtext/random.hpp"
#include "kmtext/segment.hpp"
#include "kmtext/subword.hpp"
#include "kmtext/unicode.hpp"

namespace kmtext {

enum class MaskScope { kSentence, kChunk };

struct NoiseConfig {
  double mask_ratio = 0.35;
  double poisson_lambda = 3.5;
  size_t max_seq_len = 1024;
  uint64_t rng_seed = 0;
  MaskScope scope = MaskScope::kSentence;

  void Validate() const {
    if (!(mask_ratio >= 0.0 && mask_ratio <= 1.0)) throw ConfigError("mask_ratio must be in [0, 1]");
    if (!(poisson_lambda > 0.0)) throw ConfigError("poisson_lambda must be > 0");
    if (max_seq_len < 3) throw ConfigError("max_seq_len must leave room for eos and a language tag");
  }
};

struct Span {
  size_t start = 0;
  size_t length = 0;

  size_t end() const { return start + length; }
  bool operator==(const Span&) const = default;
};

struct ChunkRange {
  size_t begin = 0;  // token index, inclusive
  size_t end = 0;    // token index, exclusive

  bool operator==(const ChunkRange&) const = default;
};

struct ChunkPlan {
  std::vector<ChunkRange> chunks;
  size_t hard_splits = 0;  // sentences longer than the budget
};

// Greedy packing of whole sentences into chunks whose summed token cost is
// at most `budget`. `sentence_starts` must begin with 0 and be increasing.
// A sentence that alone exceeds the budget is cut into budget-sized pieces;
// every token cost must itself fit the budget.
inline ChunkPlan ChunkByCost(const std::vector<size_t>& costs,
                             const std::vector<size_t>& sentence_starts, size_t budget) {
  ChunkPlan plan;
  const size_t n = costs.size();
  if (n == 0) return plan;
  if (budget == 0) throw ConfigError("chunk budget must be positive");
  for (size_t c : costs) {
    if (c > budget) throw InvariantViolation("token cost exceeds chunk budget");
  }
  std::vector<size_t> starts = sentence_starts;
  if (starts.empty() || starts.front() != 0) starts.insert(starts.begin(), 0);
  starts.push_back(n);

  size_t chunk_begin = 0, chunk_cost = 0;
  auto close = [&](size_t end) {
    if (end > chunk_begin) plan.chunks.push_back({chunk_begin, end});
    chunk_begin = end;
    chunk_cost = 0;
  };
  for (size_t s = 0; s + 1 < starts.size(); ++s) {
    const size_t sb = starts[s], se = starts[s + 1];
    if (sb >= se) continue;
    size_t cost = 0;
    for (size_t i = sb; i < se; ++i) cost += costs[i];
    if (chunk_cost + cost <= budget) {
      chunk_cost += cost;
      continue;
    }
    close(sb);
    if (cost <= budget) {
      chunk_cost = cost;
      continue;
    }
    ++plan.hard_splits;
    for (size_t i = sb; i < se; ++i) {
      if (chunk_cost + costs[i] > budget) close(i);
      chunk_cost += costs[i];
    }
  }
  close(n);
  return plan;
}

// Unit-cost chunking: each token counts one towards max_seq_len.
inline ChunkPlan ChunkDocument(size_t n_tokens, const std::vector<size_t>& sentence_starts,
                               size_t max_seq_len) {
  return ChunkByCost(std::vector<size_t>(n_tokens, 1), sentence_starts, max_seq_len);
}

// Token index at which each sentence starts. Tokens must concatenate to
// the sentence-split text.
inline std::vector<size_t> SentenceStartTokens(const std::vector<Token>& tokens) {
  std::u32string text;
  std::vector<size_t> token_offset;
  for (const auto& t : tokens) {
    token_offset.push_back(text.size());
    text += DecodeUtf8(t.surface);
  }
  std::vector<size_t> starts;
  size_t ti = 0;
  for (auto [b, e] : SentenceSpans(text)) {
    while (ti < tokens.size() && token_offset[ti] < b) ++ti;
    if (ti < tokens.size() && (starts.empty() || starts.back() != ti)) starts.push_back(ti);
  }
  if (starts.empty() || starts.front() != 0) starts.insert(starts.begin(), 0);
  return starts;
}

// Zero-truncated Poisson: zero draws are redrawn.
inline size_t DrawSpanLength(Rng& rng, double lambda) {
  for (;;) {
    const uint64_t k = rng.Poisson(lambda);
    if (k > 0) return static_cast<size_t>(k);
  }
}

// Disjoint spans over [0, n_words) masking round(mask_ratio * n_words)
// words. Each span length is drawn before placement; the last one is cut to
// the remaining budget. Starts are uniform over unmasked positions with
// rejection on overlap; after 64 rejections the span goes to the start of a
// random free run, shortened to fit. `drawn` receives the untruncated
// lengths. Spans are returned sorted by start.
inline std::vector<Span> SampleSpans(size_t n_words, const NoiseConfig& cfg, Rng& rng,
                                     std::vector<size_t>* drawn = nullptr) {
  std::vector<Span> spans;
  const auto budget = static_cast<size_t>(std::llround(cfg.mask_ratio * static_cast<double>(n_words)));
  std::vector<bool> masked(n_words, false);
  std::vector<size_t> free_pos;
  size_t total = 0;
  while (total < budget) {
    const size_t drawn_len = DrawSpanLength(rng, cfg.poisson_lambda);
    if (drawn) drawn->push_back(drawn_len);
    size_t len = std::min(drawn_len, budget - total);
    free_pos.clear();
    for (size_t i = 0; i < n_words; ++i) {
      if (!masked[i]) free_pos.push_back(i);
    }
    bool placed = false;
    size_t start = 0;
    for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
      start = free_pos[rng.Uniform(free_pos.size())];
      if (start + len > n_words) continue;
      placed = std::none_of(masked.begin() + static_cast<std::ptrdiff_t>(start),
                            masked.begin() + static_cast<std::ptrdiff_t>(start + len),
                            [](bool b) { return b; });
    }
    if (!placed) {
      std::vector<Span> runs;
      for (size_t i = 0; i < n_words;) {
        if (masked[i]) {
          ++i;
          continue;
        }
        size_t j = i;
        while (j < n_words && !masked[j]) ++j;
        runs.push_back({i, j - i});
        i = j;
      }
      const Span run = runs[rng.Uniform(runs.size())];
      start = run.start;
      len = std::min(len, run.length);
    }
    for (size_t i = start; i < start + len; ++i) masked[i] = true;
    spans.push_back({start, len});
    total += len;
  }
  std::sort(spans.begin(), spans.end(),
            [](const Span& a, const Span& b) { return a.start < b.start; });
  return spans;
}

inline void CheckSpans(const std::vector<Span>& spans, size_t n) {
  std::vector<Span> sorted = spans;
  std::sort(sorted.begin(), sorted.end(),
            [](const Span& a, const Span& b) { return a.start < b.start; });
  size_t prev_end = 0;
  for (const auto& s : sorted) {
    if (s.length == 0 || s.end() > n) throw OverlappingSpans("span out of range");
    if (s.start < prev_end) throw OverlappingSpans("spans overlap");
    prev_end = s.end();
  }
}

// Replaces every span with one `mask` element.
template <typename T>
std::vector<T> ApplyMask(const std::vector<T>& words, const std::vector<Span>& spans,
                         const T& mask) {
  CheckSpans(spans, words.size());
  std::vector<Span> sorted = spans;
  std::sort(sorted.begin(), sorted.end(),
            [](const Span& a, const Span& b) { return a.start < b.start; });
  std::vector<T> out;
  size_t i = 0;
  for (const auto& s : sorted) {
    for (; i < s.start; ++i) out.push_back(words[i]);
    out.push_back(mask);
    i = s.end();
  }
  for (; i < words.size(); ++i) out.push_back(words[i]);
  return out;
}

struct TrainingPair {
  std::string doc_id;
  uint64_t chunk_index = 0;
  std::vector<int> source_ids;
  std::vector<int> target_ids;

  bool operator==(const TrainingPair&) const = default;
};

struct NoiseStats {
  size_t chunks = 0;
  size_t hard_splits = 0;
  size_t words = 0;
  size_t masked_words = 0;
  size_t spans = 0;
};

namespace internal {

// Splits tokens whose encoding alone would not fit the budget into single
// codepoint tokens.
inline std::vector<Token> FitTokens(const std::vector<Token>& tokens, const SubwordVocab& vocab,
                                    size_t budget, std::vector<size_t>* costs) {
  std::vector<Token> out;
  costs->clear();
  for (const auto& t : tokens) {
    const size_t c = t.IsSpace() ? 1 : vocab.EncodeUnit(DecodeUtf8(t.surface)).size();
    if (c <= budget) {
      out.push_back(t);
      costs->push_back(c);
      continue;
    }
    for (char32_t cp : DecodeUtf8(t.surface)) {
      out.push_back({EncodeUtf8(std::u32string(1, cp)), t.kind});
      costs->push_back(1);
    }
  }
  return out;
}

inline std::vector<Token> Slice(const std::vector<Token>& v, size_t b, size_t e) {
  return {v.begin() + static_cast<std::ptrdiff_t>(b), v.begin() + static_cast<std::ptrdiff_t>(e)};
}

}  // namespace internal

// Noises one segmented document. Chunks hold at most max_seq_len - 2
// pieces so that eos and the language tag fit; spans are sampled per
// sentence (or per chunk) from a stream keyed by (seed, doc_id, chunk).
inline std::vector<TrainingPair> MakePairs(const std::string& doc_id, Lang lang,
                                           const std::vector<Token>& doc_tokens,
                                           const SubwordVocab& vocab, const NoiseConfig& cfg,
                                           NoiseStats* stats = nullptr) {
  cfg.Validate();
  const size_t budget = cfg.max_seq_len - 2;
  std::vector<size_t> costs;
  const std::vector<Token> tokens = internal::FitTokens(doc_tokens, vocab, budget, &costs);
  const std::vector<size_t> starts = SentenceStartTokens(tokens);
  ChunkPlan plan = ChunkByCost(costs, starts, budget);

  // Phrase-mode encodings are not additive over tokens; split any chunk
  // that overflows at its midpoint until everything fits.
  std::vector<ChunkRange> fitted;
  std::vector<ChunkRange> pending(plan.chunks.rbegin(), plan.chunks.rend());
  while (!pending.empty()) {
    ChunkRange c = pending.back();
    pending.pop_back();
    if (c.end - c.begin <= 1 ||
        vocab.Encode(internal::Slice(tokens, c.begin, c.end)).size() <= budget) {
      fitted.push_back(c);
      continue;
    }
    const size_t mid = c.begin + (c.end - c.begin) / 2;
    pending.push_back({mid, c.end});
    pending.push_back({c.begin, mid});
  }

  const int lang_tag = vocab.lang_id(lang == Lang::kKm ? 0 : 1);
  std::vector<TrainingPair> pairs;
  for (size_t ci = 0; ci < fitted.size(); ++ci) {
    const ChunkRange c = fitted[ci];
    Rng rng = Rng::Keyed(cfg.rng_seed, doc_id, ci);
    std::vector<Span> spans;
    if (cfg.scope == MaskScope::kChunk) {
      spans = SampleSpans(c.end - c.begin, cfg, rng);
    } else {
      std::vector<size_t> bounds = {c.begin};
      for (size_t s : starts) {
        if (s > c.begin && s < c.end) bounds.push_back(s);
      }
      bounds.push_back(c.end);
      for (size_t k = 0; k + 1 < bounds.size(); ++k) {
        for (Span s : SampleSpans(bounds[k + 1] - bounds[k], cfg, rng)) {
          s.start += bounds[k] - c.begin;
          spans.push_back(s);
        }
      }
    }
    const std::vector<Token> chunk = internal::Slice(tokens, c.begin, c.end);
    CheckSpans(spans, chunk.size());

    TrainingPair pair;
    pair.doc_id = doc_id;
    pair.chunk_index = ci;
    pair.target_ids = vocab.Encode(chunk);
    size_t i = 0;
    for (const auto& s : spans) {
      const auto part = vocab.Encode(internal::Slice(chunk, i, s.start));
      pair.source_ids.insert(pair.source_ids.end(), part.begin(), part.end());
      pair.source_ids.push_back(vocab.mask_id());
      i = s.end();
    }
    const auto tail = vocab.Encode(internal::Slice(chunk, i, chunk.size()));
    pair.source_ids.insert(pair.source_ids.end(), tail.begin(), tail.end());
    for (auto* ids : {&pair.source_ids, &pair.target_ids}) {
      ids->push_back(vocab.eos_id());
      ids->push_back(lang_tag);
    }
    if (pair.source_ids.size() > cfg.max_seq_len || pair.target_ids.size() > cfg.max_seq_len) {
      throw InvariantViolation("training pair exceeds max_seq_len for " + doc_id);
    }
    if (stats) {
      stats->words += chunk.size();
      stats->spans += spans.size();
      for (const auto& s : spans) stats->masked_words += s.length;
    }
    pairs.push_back(std::move(pair));
  }
  if (stats) {
    stats->chunks += fitted.size();
    stats->hard_splits += plan.hard_splits;
  }
  return pairs;
}

// Binary pair stream: "KMNP", version byte 1, then per record
//   varint len, doc_id bytes, varint chunk_index,
//   varint n_src, n_src varint ids, varint n_tgt, n_tgt varint ids.
inline constexpr char kPairMagic[4] = {'K', 'M', 'N', 'P'};
inline constexpr uint8_t kPairVersion = 1;

namespace internal {

inline void PutVarint(uint64_t v, std::ostream& out) {
  while (v >= 0x80) {
    out.put(static_cast<char>((v & 0x7F) | 0x80));
    v >>= 7;
  }
  out.put(static_cast<char>(v));
}

inline bool GetVarint(std::istream& in, uint64_t* v) {
  *v = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) return false;
    *v |= static_cast<uint64_t>(c & 0x7F) << shift;
    if (!(c & 0x80)) return true;
  }
  throw IngestionError("varint too long", 0);
}

}  // namespace internal

inline void WritePairHeader(std::ostream& out) {
  out.write(kPairMagic, 4);
  out.put(static_cast<char>(kPairVersion));
}

inline void WritePairRecord(const TrainingPair& p, std::ostream& out) {
  internal::PutVarint(p.doc_id.size(), out);
  out.write(p.doc_id.data(), static_cast<std::streamsize>(p.doc_id.size()));
  internal::PutVarint(p.chunk_index, out);
  for (const auto* ids : {&p.source_ids, &p.target_ids}) {
    internal::PutVarint(ids->size(), out);
    for (int id : *ids) internal::PutVarint(static_cast<uint64_t>(id), out);
  }
}

inline std::vector<TrainingPair> ReadPairs(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kPairMagic)) {
    throw IngestionError("bad pair-file magic", 0);
  }
  if (in.get() != kPairVersion) throw IngestionError("unsupported pair-file version", 0);
  std::vector<TrainingPair> out;
  uint64_t len;
  size_t record = 0;
  while (internal::GetVarint(in, &len)) {
    ++record;
    TrainingPair p;
    if (len > (uint64_t{1} << 20)) throw IngestionError("implausible doc_id length", record);
    p.doc_id.resize(len);
    if (!in.read(p.doc_id.data(), static_cast<std::streamsize>(len))) {
      throw IngestionError("truncated record", record);
    }
    uint64_t v;
    if (!internal::GetVarint(in, &p.chunk_index)) throw IngestionError("truncated record", record);
    for (auto* ids : {&p.source_ids, &p.target_ids}) {
      if (!internal::GetVarint(in, &len)) throw IngestionError("truncated record", record);
      for (uint64_t k = 0; k < len; ++k) {
        if (!internal::GetVarint(in, &v)) throw IngestionError("truncated record", record);
        ids->push_back(static_cast<int>(v));
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace kmtext
