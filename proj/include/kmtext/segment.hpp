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

// Sentence splitting and word segmentation that keeps functional spaces.
//
// Every U+0020 becomes its own FunctionalSpace token. Khmer runs are cut by
// maximum-likelihood unigram decoding over a word lexicon; Latin, digit and
// punctuation runs are emitted whole. Detokenize() inverts SegmentWords().

#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kmtext/error.hpp"
#include "kmtext/unicode.hpp"

namespace kmtext {

enum class TokenKind : uint8_t { kWord, kFunctionalSpace, kLatin, kNumber, kPunct };

inline std::string_view TokenKindName(TokenKind k) {
  switch (k) {
    case TokenKind::kWord: return "word";
    case TokenKind::kFunctionalSpace: return "space";
    case TokenKind::kLatin: return "latin";
    case TokenKind::kNumber: return "number";
    case TokenKind::kPunct: return "punct";
  }
  return "word";
}

struct Token {
  std::string surface;  // UTF-8, never empty
  TokenKind kind = TokenKind::kWord;

  bool IsSpace() const { return kind == TokenKind::kFunctionalSpace; }
  bool operator==(const Token&) const = default;
};

// Separator for pre-segmented input (SYMBOL FOR UNIT SEPARATOR).
inline constexpr char32_t kUnitSeparator = 0x241F;

class Lexicon {
 public:
  Lexicon() = default;

  void Add(std::u32string word, uint64_t count) {
    if (word.empty() || count == 0) return;
    max_len_ = std::max(max_len_, word.size());
    entries_[std::move(word)] += count;
    total_ += count;
  }

  // `word<TAB>count` per line, UTF-8. Blank lines and `#` comments skipped.
  static Lexicon Parse(std::istream& in) {
    Lexicon lex;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos || tab == 0) {
        throw IngestionError("lexicon entry must be word<TAB>count", lineno);
      }
      uint64_t count = 0;
      try {
        size_t used = 0;
        count = std::stoull(line.substr(tab + 1), &used);
        if (used != line.size() - tab - 1) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw IngestionError("bad lexicon count", lineno);
      }
      if (count < 1) throw IngestionError("lexicon counts must be >= 1", lineno);
      lex.Add(DecodeUtf8(std::string_view(line).substr(0, tab)), count);
    }
    return lex;
  }

  bool empty() const { return entries_.empty(); }
  size_t size() const { return entries_.size(); }
  uint64_t total() const { return total_; }
  size_t max_word_len() const { return max_len_; }

  std::optional<double> LogProb(std::u32string_view w) const {
    auto it = entries_.find(std::u32string(w));
    if (it == entries_.end()) return std::nullopt;
    return std::log(static_cast<double>(it->second) / static_cast<double>(total_));
  }

  uint64_t Count(std::u32string_view w) const {
    auto it = entries_.find(std::u32string(w));
    return it == entries_.end() ? 0 : it->second;
  }

  double DefaultOovPenalty() const {
    return std::log(1.0 / static_cast<double>(std::max<uint64_t>(total_, 1))) - 2.0;
  }

  const std::unordered_map<std::u32string, uint64_t>& entries() const { return entries_; }

 private:
  std::unordered_map<std::u32string, uint64_t> entries_;
  uint64_t total_ = 0;
  size_t max_len_ = 0;
};

struct SegmenterOptions {
  // Log-probability charged per out-of-lexicon character; defaults to
  // log(1/total) - 2 of the lexicon in use.
  std::optional<double> oov_penalty;
};

struct ViterbiResult {
  std::vector<std::u32string> words;
  double score = 0.0;
};

// Score of using `piece` as one word; nullopt if not allowed.
inline std::optional<double> WordScore(std::u32string_view piece, const Lexicon& lex,
                                       double oov_penalty) {
  auto lp = lex.LogProb(piece);
  if (piece.size() == 1) return lp ? std::max(*lp, oov_penalty) : oov_penalty;
  return lp;
}

// Best segmentation of `span` into lexicon words, single characters always
// allowed. Ties keep the earliest-found path.
inline ViterbiResult ViterbiSegment(std::u32string_view span, const Lexicon& lex,
                                    double oov_penalty) {
  const size_t n = span.size();
  const double kNeg = -std::numeric_limits<double>::infinity();
  std::vector<double> best(n + 1, kNeg);
  std::vector<size_t> back(n + 1, 0);
  best[0] = 0.0;
  const size_t maxlen = std::max<size_t>(lex.max_word_len(), 1);
  for (size_t end = 1; end <= n; ++end) {
    const size_t lo = end > maxlen ? end - maxlen : 0;
    for (size_t start = end - 1;; --start) {
      if (auto s = WordScore(span.substr(start, end - start), lex, oov_penalty)) {
        const double cand = best[start] + *s;
        if (cand > best[end]) {
          best[end] = cand;
          back[end] = start;
        }
      }
      if (start == lo) break;
    }
  }
  ViterbiResult r;
  r.score = best[n];
  for (size_t end = n; end > 0; end = back[end]) {
    r.words.emplace_back(span.substr(back[end], end - back[end]));
  }
  std::reverse(r.words.begin(), r.words.end());
  return r;
}

namespace internal {

enum class RunKind { kKhmer, kLatin, kDigit, kOtherLetter };

inline std::optional<RunKind> RunKindOf(CharClass c) {
  switch (c) {
    case CharClass::kKhmer: return RunKind::kKhmer;
    case CharClass::kLatin: return RunKind::kLatin;
    case CharClass::kDigit: return RunKind::kDigit;
    case CharClass::kOtherLetter: return RunKind::kOtherLetter;
    default: return std::nullopt;
  }
}

}  // namespace internal

inline std::vector<Token> SegmentWords(std::u32string_view text, const Lexicon& lex,
                                       const SegmenterOptions& opts = {}) {
  using internal::RunKind;
  std::vector<Token> out;
  const double penalty = opts.oov_penalty.value_or(lex.DefaultOovPenalty());
  auto emit_run = [&](std::u32string_view run, RunKind kind) {
    switch (kind) {
      case RunKind::kKhmer: {
        if (lex.empty()) throw EmptyLexicon("cannot segment Khmer text without a lexicon");
        for (auto& w : ViterbiSegment(run, lex, penalty).words) {
          out.push_back({EncodeUtf8(w), TokenKind::kWord});
        }
        break;
      }
      case RunKind::kLatin: out.push_back({EncodeUtf8(run), TokenKind::kLatin}); break;
      case RunKind::kDigit: out.push_back({EncodeUtf8(run), TokenKind::kNumber}); break;
      case RunKind::kOtherLetter: out.push_back({EncodeUtf8(run), TokenKind::kWord}); break;
    }
  };
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    const CharClass cls = Classify(text[i]);
    if (cls == CharClass::kSpace) {
      out.push_back({" ", TokenKind::kFunctionalSpace});
      ++i;
      continue;
    }
    auto kind = internal::RunKindOf(cls);
    if (!kind) {
      // Punctuation, symbols, emoji, stray marks: one token per codepoint,
      // trailing combining marks attached.
      size_t j = i + 1;
      while (j < n && Classify(text[j]) == CharClass::kInherited) ++j;
      out.push_back({EncodeUtf8(text.substr(i, j - i)), TokenKind::kPunct});
      i = j;
      continue;
    }
    size_t j = i + 1;
    while (j < n) {
      const CharClass c = Classify(text[j]);
      if (c != CharClass::kInherited && internal::RunKindOf(c) != kind) break;
      ++j;
    }
    emit_run(text.substr(i, j - i), *kind);
    i = j;
  }
  return out;
}

inline std::vector<Token> SegmentWords(std::string_view utf8, const Lexicon& lex,
                                       const SegmenterOptions& opts = {}) {
  return SegmentWords(DecodeUtf8(utf8), lex, opts);
}

inline TokenKind ClassifyToken(std::u32string_view surface) {
  if (surface == U" ") return TokenKind::kFunctionalSpace;
  bool all_digit = true, all_latin = true;
  for (char32_t c : surface) {
    const CharClass cls = Classify(c);
    all_digit &= cls == CharClass::kDigit;
    all_latin &= cls == CharClass::kLatin || cls == CharClass::kInherited;
  }
  if (all_digit) return TokenKind::kNumber;
  if (all_latin && Classify(surface[0]) == CharClass::kLatin) return TokenKind::kLatin;
  const auto first = Classify(surface[0]);
  if (surface.size() == 1 && (first == CharClass::kPunct || first == CharClass::kOther ||
                              first == CharClass::kEmoji)) {
    return TokenKind::kPunct;
  }
  return TokenKind::kWord;
}

// Ingests externally segmented text: tokens separated by U+241F, each space
// a literal U+0020 token. Spaces embedded in a token are split out.
inline std::vector<Token> ParsePresegmented(std::u32string_view text) {
  std::vector<Token> out;
  auto flush = [&](std::u32string_view piece) {
    size_t start = 0;
    for (size_t k = 0; k <= piece.size(); ++k) {
      if (k == piece.size() || piece[k] == kSpace) {
        if (k > start) {
          auto w = piece.substr(start, k - start);
          out.push_back({EncodeUtf8(w), ClassifyToken(w)});
        }
        if (k < piece.size()) out.push_back({" ", TokenKind::kFunctionalSpace});
        start = k + 1;
      }
    }
  };
  size_t start = 0;
  for (size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == kUnitSeparator) {
      flush(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline std::vector<Token> ParsePresegmented(std::string_view utf8) {
  return ParsePresegmented(DecodeUtf8(utf8));
}

inline std::string JoinPresegmented(const std::vector<Token>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) AppendUtf8(kUnitSeparator, &out);
    out += tokens[i].surface;
  }
  return out;
}

inline std::string Detokenize(const std::vector<Token>& tokens) {
  std::string out;
  for (const auto& t : tokens) out += t.surface;
  return out;
}

inline std::vector<Token> DropFunctionalSpaces(const std::vector<Token>& tokens) {
  std::vector<Token> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!t.IsSpace()) out.push_back(t);
  }
  return out;
}

inline bool IsSentenceTerminator(char32_t c) {
  return c == 0x17D4 || c == 0x17D5 || c == U'.' || c == U'!' || c == U'?';
}

// Half-open [begin, end) codepoint ranges covering the whole text. A
// sentence ends after a Khmer khan (U+17D4, U+17D5), or after . ! ? when
// followed by a space or the end of text; a run of terminators ends at its
// last member. Spaces at a boundary start the next sentence; a trailing
// all-space remainder stays with the last sentence.
inline std::vector<std::pair<size_t, size_t>> SentenceSpans(std::u32string_view text) {
  std::vector<std::pair<size_t, size_t>> spans;
  const size_t n = text.size();
  size_t begin = 0;
  for (size_t i = 0; i < n; ++i) {
    const char32_t c = text[i];
    if (!IsSentenceTerminator(c)) continue;
    if (i + 1 < n && IsSentenceTerminator(text[i + 1])) continue;
    const bool khan = c == 0x17D4 || c == 0x17D5;
    if (!khan && i + 1 < n && text[i + 1] != kSpace) continue;
    spans.emplace_back(begin, i + 1);
    begin = i + 1;
  }
  if (begin < n) {
    const bool all_space = std::all_of(text.begin() + begin, text.end(),
                                       [](char32_t ch) { return ch == kSpace; });
    if (all_space && !spans.empty()) spans.back().second = n;
    else spans.emplace_back(begin, n);
  }
  return spans;
}

inline std::vector<std::string> SplitSentences(std::string_view utf8) {
  const std::u32string text = DecodeUtf8(utf8);
  std::vector<std::string> out;
  for (auto [b, e] : SentenceSpans(text)) {
    out.push_back(EncodeUtf8(std::u32string_view(text).substr(b, e - b)));
  }
  return out;
}

}  // namespace kmtext
