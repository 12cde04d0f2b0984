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

// Unigram language-model subword tokenizer.
//
// Training works on "boundary units": word tokens in kWordSegmented mode,
// space-delimited phrases in kRawPhrase mode. No piece ever spans a unit
// boundary, and functional spaces are never part of a unit; they map to a
// reserved space piece instead.
//
//   SeedVocab     all substrings up to a length cap, ranked by freq * len
//   EmTrain       forward-backward expected counts, maximum-likelihood M-step
//   PruneRound    drop the pieces whose removal costs the least likelihood
//   TrainUnigram  seed -> EM -> (prune -> EM)* -> final EM
//
// All lattice arithmetic is in log space.

#pragma once

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kmtext/error.hpp"
#include "kmtext/parallel.hpp"
#include "kmtext/segment.hpp"
#include "kmtext/unicode.hpp"

namespace kmtext {

enum class TokenizerMode { kWordSegmented, kRawPhrase };

inline std::string_view ModeName(TokenizerMode m) {
  return m == TokenizerMode::kWordSegmented ? "word" : "phrase";
}

inline TokenizerMode ParseMode(std::string_view s) {
  if (s == "word" || s == "word-segmented") return TokenizerMode::kWordSegmented;
  if (s == "phrase" || s == "raw-phrase") return TokenizerMode::kRawPhrase;
  throw ConfigError("unknown tokenizer mode '" + std::string(s) + "'");
}

struct Piece {
  std::u32string surface;
  double log_prob = 0.0;

  bool operator==(const Piece&) const = default;
};

struct Unit {
  std::u32string text;
  uint64_t freq = 0;
};

// Deduplicated boundary units, sorted by text.
class UnitCorpus {
 public:
  void AddUnit(std::u32string_view unit, uint64_t freq = 1) {
    if (unit.empty()) return;
    counts_[std::u32string(unit)] += freq;
  }

  void AddTokens(const std::vector<Token>& tokens, TokenizerMode mode) {
    std::u32string phrase;
    for (const auto& t : tokens) {
      if (t.IsSpace()) {
        AddUnit(phrase);
        phrase.clear();
        continue;
      }
      if (mode == TokenizerMode::kWordSegmented) {
        AddUnit(DecodeUtf8(t.surface));
      } else {
        phrase += DecodeUtf8(t.surface);
      }
    }
    AddUnit(phrase);
  }

  // Raw text split on U+0020 (phrase units).
  void AddText(std::u32string_view text) {
    size_t start = 0;
    for (size_t i = 0; i <= text.size(); ++i) {
      if (i == text.size() || text[i] == kSpace) {
        AddUnit(text.substr(start, i - start));
        start = i + 1;
      }
    }
  }

  void Merge(const UnitCorpus& other) {
    for (const auto& [u, f] : other.counts_) counts_[u] += f;
  }

  std::vector<Unit> Units() const {
    std::vector<Unit> out;
    out.reserve(counts_.size());
    for (const auto& [u, f] : counts_) out.push_back({u, f});
    return out;
  }

  size_t size() const { return counts_.size(); }
  bool empty() const { return counts_.empty(); }

 private:
  std::map<std::u32string, uint64_t> counts_;
};

// Codepoint trie over piece surfaces, stored as one flat hash table.
class PieceTrie {
 public:
  void Build(const std::vector<std::u32string>& surfaces) {
    edges_.clear();
    terminal_.assign(1, -1);
    max_len_ = 0;
    for (size_t id = 0; id < surfaces.size(); ++id) Insert(surfaces[id], static_cast<int>(id));
  }

  void Insert(std::u32string_view s, int id) {
    uint32_t node = 0;
    for (char32_t c : s) {
      const uint64_t key = Key(node, c);
      auto it = edges_.find(key);
      if (it == edges_.end()) {
        const auto child = static_cast<uint32_t>(terminal_.size());
        terminal_.push_back(-1);
        edges_.emplace(key, child);
        node = child;
      } else {
        node = it->second;
      }
    }
    terminal_[node] = id;
    max_len_ = std::max(max_len_, s.size());
  }

  // Calls fn(end, id) for every piece that is a prefix of text[begin..).
  template <typename Fn>
  void ForEachPrefix(std::u32string_view text, size_t begin, Fn&& fn) const {
    uint32_t node = 0;
    const size_t lim = std::min(text.size(), begin + max_len_);
    for (size_t j = begin; j < lim; ++j) {
      auto it = edges_.find(Key(node, text[j]));
      if (it == edges_.end()) return;
      node = it->second;
      if (terminal_[node] >= 0) fn(j + 1, terminal_[node]);
    }
  }

  size_t max_len() const { return max_len_; }

 private:
  static uint64_t Key(uint32_t node, char32_t c) {
    return (static_cast<uint64_t>(node) << 21) | static_cast<uint64_t>(c & 0x1FFFFF);
  }

  std::unordered_map<uint64_t, uint32_t> edges_;
  std::vector<int> terminal_{-1};
  size_t max_len_ = 0;
};

inline double LogAddExp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

struct SpecialTokens {
  std::string unk = "<unk>";
  std::string bos = "<s>";
  std::string eos = "</s>";
  std::string mask = "<mask>";
  std::string space = "<space>";
  std::vector<std::string> langs = {"<2km>", "<2en>"};

  size_t size() const { return 5 + langs.size(); }
  bool operator==(const SpecialTokens&) const = default;
};

namespace internal {

inline std::string EscapeSurface(std::u32string_view s) {
  std::string out;
  for (char32_t c : s) {
    switch (c) {
      case U'\\': out += "\\\\"; break;
      case U'\t': out += "\\t"; break;
      case U'\n': out += "\\n"; break;
      case U'\r': out += "\\r"; break;
      default: AppendUtf8(c, &out);
    }
  }
  return out;
}

inline std::u32string UnescapeSurface(std::string_view s) {
  std::string raw;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      const char n = s[++i];
      raw += n == 't' ? '\t' : n == 'n' ? '\n' : n == 'r' ? '\r' : n;
    } else {
      raw += s[i];
    }
  }
  return DecodeUtf8(raw);
}

inline std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace internal

// Piece inventory plus reserved specials. Ids: specials first (unk, bos,
// eos, mask, space, language tags), then pieces in stored order.
class SubwordVocab {
 public:
  SubwordVocab() = default;
  SubwordVocab(std::vector<Piece> pieces, TokenizerMode mode, size_t target_size = 32000,
               SpecialTokens specials = {})
      : pieces_(std::move(pieces)),
        specials_(std::move(specials)),
        mode_(mode),
        target_size_(target_size) {
    Rebuild();
  }

  int unk_id() const { return 0; }
  int bos_id() const { return 1; }
  int eos_id() const { return 2; }
  int mask_id() const { return 3; }
  int space_id() const { return 4; }
  int lang_id(size_t i) const { return 5 + static_cast<int>(i); }
  int lang_id(std::string_view tag) const {
    for (size_t i = 0; i < specials_.langs.size(); ++i) {
      if (specials_.langs[i] == tag) return lang_id(i);
    }
    throw InvalidId("unknown language tag " + std::string(tag));
  }
  int num_specials() const { return static_cast<int>(specials_.size()); }
  int size() const { return num_specials() + static_cast<int>(pieces_.size()); }
  bool IsSpecial(int id) const { return id >= 0 && id < num_specials(); }

  const std::vector<Piece>& pieces() const { return pieces_; }
  const SpecialTokens& specials() const { return specials_; }
  TokenizerMode mode() const { return mode_; }
  size_t target_size() const { return target_size_; }

  const Piece& piece(int id) const { return pieces_.at(id - num_specials()); }

  std::optional<int> PieceId(std::u32string_view surface) const {
    auto it = index_.find(std::u32string(surface));
    if (it == index_.end()) return std::nullopt;
    return it->second + num_specials();
  }

  // Surface used when decoding; control specials decode to nothing.
  std::u32string SurfaceOf(int id) const {
    if (id < 0 || id >= size()) throw InvalidId("id " + std::to_string(id) + " out of range");
    if (id >= num_specials()) return piece(id).surface;
    if (id == space_id()) return U" ";
    if (id == unk_id()) return U"⁇";
    if (id == mask_id()) return DecodeUtf8(specials_.mask);
    return {};
  }

  // Viterbi segmentation of one boundary unit. Codepoints without a piece
  // become unk.
  void EncodeUnit(std::u32string_view unit, std::vector<int>* ids) const {
    const size_t n = unit.size();
    if (n == 0) return;
    const double kNeg = -std::numeric_limits<double>::infinity();
    std::vector<double> best(n + 1, kNeg);
    std::vector<size_t> back(n + 1, 0);
    std::vector<int> via(n + 1, -1);
    best[0] = 0.0;
    for (size_t i = 0; i < n; ++i) {
      if (best[i] == kNeg) continue;
      bool has_char = false;
      trie_.ForEachPrefix(unit, i, [&](size_t end, int pid) {
        if (end == i + 1 && std::isfinite(pieces_[pid].log_prob)) has_char = true;
        const double cand = best[i] + pieces_[pid].log_prob;
        if (cand > best[end]) {
          best[end] = cand;
          back[end] = i;
          via[end] = pid + num_specials();
        }
      });
      if (!has_char) {
        const double cand = best[i] + unk_log_prob_;
        if (cand > best[i + 1]) {
          best[i + 1] = cand;
          back[i + 1] = i;
          via[i + 1] = unk_id();
        }
      }
    }
    const size_t mark = ids->size();
    for (size_t end = n; end > 0; end = back[end]) ids->push_back(via[end]);
    std::reverse(ids->begin() + static_cast<std::ptrdiff_t>(mark), ids->end());
  }

  std::vector<int> EncodeUnit(std::u32string_view unit) const {
    std::vector<int> ids;
    EncodeUnit(unit, &ids);
    return ids;
  }

  // Tokens -> ids. Functional spaces map to the space piece; other tokens
  // are encoded per word (kWordSegmented) or per space-delimited phrase.
  std::vector<int> Encode(const std::vector<Token>& tokens) const {
    std::vector<int> ids;
    std::u32string phrase;
    for (const auto& t : tokens) {
      if (t.IsSpace()) {
        EncodeUnit(phrase, &ids);
        phrase.clear();
        ids.push_back(space_id());
      } else if (mode_ == TokenizerMode::kWordSegmented) {
        EncodeUnit(DecodeUtf8(t.surface), &ids);
      } else {
        phrase += DecodeUtf8(t.surface);
      }
    }
    EncodeUnit(phrase, &ids);
    return ids;
  }

  // Raw text, one unit per space-delimited phrase.
  std::vector<int> EncodeText(std::u32string_view text) const {
    std::vector<int> ids;
    size_t start = 0;
    for (size_t i = 0; i <= text.size(); ++i) {
      if (i == text.size() || text[i] == kSpace) {
        EncodeUnit(text.substr(start, i - start), &ids);
        if (i < text.size()) ids.push_back(space_id());
        start = i + 1;
      }
    }
    return ids;
  }

  std::string Decode(const std::vector<int>& ids) const {
    std::u32string out;
    for (int id : ids) out += SurfaceOf(id);
    return EncodeUtf8(out);
  }

  // Space pieces become FunctionalSpace tokens; everything between two
  // spaces is one Word token.
  std::vector<Token> DecodeTokens(const std::vector<int>& ids) const {
    std::vector<Token> out;
    std::u32string cur;
    auto flush = [&] {
      if (!cur.empty()) out.push_back({EncodeUtf8(cur), ClassifyToken(cur)});
      cur.clear();
    };
    for (int id : ids) {
      if (id == space_id()) {
        SurfaceOf(id);
        flush();
        out.push_back({" ", TokenKind::kFunctionalSpace});
      } else {
        cur += SurfaceOf(id);
      }
    }
    flush();
    return out;
  }

  // Number of codepoints an id covers in the input (unk covers one).
  size_t InputLength(int id) const {
    if (id == unk_id() || id == space_id()) return 1;
    if (id >= num_specials()) return piece(id).surface.size();
    return 0;
  }

  std::string Serialize() const {
    std::string out = "#kmtext-unigram\tversion=1\tmode=" + std::string(ModeName(mode_)) +
                      "\ttarget_size=" + std::to_string(target_size_) +
                      "\tunk=" + specials_.unk + "\tbos=" + specials_.bos +
                      "\teos=" + specials_.eos + "\tmask=" + specials_.mask +
                      "\tspace=" + specials_.space + "\tlangs=";
    for (size_t i = 0; i < specials_.langs.size(); ++i) {
      if (i) out += ',';
      out += specials_.langs[i];
    }
    out += '\n';
    for (const auto& p : pieces_) {
      out += internal::EscapeSurface(p.surface) + "\t" + internal::FormatDouble(p.log_prob) + "\n";
    }
    return out;
  }

  static SubwordVocab Parse(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("#kmtext-unigram", 0) != 0) {
      throw IngestionError("missing vocab header", 1);
    }
    SpecialTokens sp;
    TokenizerMode mode = TokenizerMode::kWordSegmented;
    size_t target = 32000;
    std::stringstream hs(line);
    std::string field;
    std::getline(hs, field, '\t');
    while (std::getline(hs, field, '\t')) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) throw IngestionError("bad header field " + field, 1);
      const std::string key = field.substr(0, eq), val = field.substr(eq + 1);
      if (key == "version" && val != "1") throw IngestionError("unsupported vocab version", 1);
      if (key == "mode") {
        if (val != "word" && val != "phrase") throw IngestionError("bad mode " + val, 1);
        mode = ParseMode(val);
      }
      if (key == "target_size") {
        try {
          target = std::stoull(val);
        } catch (const std::exception&) {
          throw IngestionError("bad target_size", 1);
        }
      }
      if (key == "unk") sp.unk = val;
      if (key == "bos") sp.bos = val;
      if (key == "eos") sp.eos = val;
      if (key == "mask") sp.mask = val;
      if (key == "space") sp.space = val;
      if (key == "langs") {
        sp.langs.clear();
        std::stringstream ls(val);
        std::string tag;
        while (std::getline(ls, tag, ',')) sp.langs.push_back(tag);
      }
    }
    std::vector<Piece> pieces;
    size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto tab = line.rfind('\t');
      if (tab == std::string::npos || tab == 0) throw IngestionError("expected piece<TAB>log_prob", lineno);
      double lp;
      try {
        lp = std::stod(line.substr(tab + 1));
      } catch (const std::exception&) {
        throw IngestionError("bad log_prob", lineno);
      }
      pieces.push_back({internal::UnescapeSurface(std::string_view(line).substr(0, tab)), lp});
    }
    try {
      return SubwordVocab(std::move(pieces), mode, target, std::move(sp));
    } catch (const InvariantViolation& e) {
      throw IngestionError(e.what(), 0);
    }
  }

 private:
  void Rebuild() {
    index_.clear();
    std::vector<std::u32string> surfaces;
    surfaces.reserve(pieces_.size());
    double min_lp = 0.0;
    for (size_t i = 0; i < pieces_.size(); ++i) {
      const auto& p = pieces_[i];
      if (p.surface.empty()) throw InvariantViolation("empty piece surface");
      if (p.surface.find(kSpace) != std::u32string::npos) {
        throw InvariantViolation("piece contains the reserved space character");
      }
      if (!index_.emplace(p.surface, static_cast<int>(i)).second) {
        throw InvariantViolation("duplicate piece " + EncodeUtf8(p.surface));
      }
      surfaces.push_back(p.surface);
      if (std::isfinite(p.log_prob)) min_lp = std::min(min_lp, p.log_prob);
    }
    trie_.Build(surfaces);
    unk_log_prob_ = min_lp - 10.0;
  }

  std::vector<Piece> pieces_;
  SpecialTokens specials_;
  TokenizerMode mode_ = TokenizerMode::kWordSegmented;
  size_t target_size_ = 32000;
  std::unordered_map<std::u32string, int> index_;
  PieceTrie trie_;
  double unk_log_prob_ = -10.0;
};

// Pieces that straddle a boundary between two input tokens. In
// kWordSegmented mode this is always zero.
inline size_t CountCrossBoundaryPieces(const std::vector<Token>& tokens,
                                       const std::vector<int>& ids,
                                       const SubwordVocab& vocab) {
  std::vector<size_t> boundaries;  // codepoint offsets where a token ends
  size_t off = 0;
  for (const auto& t : tokens) {
    off += DecodeUtf8(t.surface).size();
    boundaries.push_back(off);
  }
  size_t crossing = 0, pos = 0, b = 0;
  for (int id : ids) {
    const size_t len = vocab.InputLength(id);
    const size_t end = pos + len;
    while (b < boundaries.size() && boundaries[b] <= pos) ++b;
    if (b < boundaries.size() && boundaries[b] < end) ++crossing;
    pos = end;
  }
  return crossing;
}

struct Candidate {
  std::u32string surface;
  uint64_t freq = 0;
};

// Character frequencies over the unit corpus.
inline std::map<char32_t, uint64_t> CharCounts(const std::vector<Unit>& units) {
  std::map<char32_t, uint64_t> counts;
  for (const auto& u : units) {
    for (char32_t c : u.text) counts[c] += u.freq;
  }
  return counts;
}

// Splits units at codepoints outside `charset`; those are left to unk.
inline std::vector<Unit> RestrictToCharset(const std::vector<Unit>& units,
                                           const std::map<char32_t, uint64_t>& charset) {
  std::map<std::u32string, uint64_t> merged;
  for (const auto& u : units) {
    size_t start = 0;
    for (size_t i = 0; i <= u.text.size(); ++i) {
      if (i == u.text.size() || !charset.count(u.text[i])) {
        if (i > start) merged[u.text.substr(start, i - start)] += u.freq;
        start = i + 1;
      }
    }
  }
  std::vector<Unit> out;
  for (auto& [t, f] : merged) out.push_back({t, f});
  return out;
}

// All substrings of length <= max_piece_len, counted with overlap and
// weighted by unit frequency. Multi-character candidates are ranked by
// freq * length (ties: surface order) and truncated to seed_size; every
// single character is kept regardless.
inline std::vector<Candidate> SeedVocab(const std::vector<Unit>& units, size_t max_piece_len,
                                        size_t seed_size) {
  std::unordered_map<std::u32string, uint64_t> counts;
  std::map<char32_t, uint64_t> chars;
  for (const auto& u : units) {
    const size_t n = u.text.size();
    for (size_t i = 0; i < n; ++i) {
      chars[u.text[i]] += u.freq;
      const size_t lim = std::min(n, i + max_piece_len);
      for (size_t j = i + 2; j <= lim; ++j) counts[u.text.substr(i, j - i)] += u.freq;
    }
  }
  std::vector<Candidate> multi;
  multi.reserve(counts.size());
  for (auto& [s, f] : counts) multi.push_back({s, f});
  std::sort(multi.begin(), multi.end(), [](const Candidate& a, const Candidate& b) {
    const uint64_t sa = a.freq * a.surface.size(), sb = b.freq * b.surface.size();
    if (sa != sb) return sa > sb;
    return a.surface < b.surface;
  });
  if (multi.size() > seed_size) multi.resize(seed_size);
  std::vector<Candidate> out;
  out.reserve(chars.size() + multi.size());
  for (auto& [c, f] : chars) out.push_back({std::u32string(1, c), f});
  for (auto& c : multi) out.push_back(std::move(c));
  return out;
}

// Initial log-probabilities proportional to freq * length.
inline std::vector<Piece> InitialPieces(const std::vector<Candidate>& cands) {
  double total = 0.0;
  for (const auto& c : cands) total += static_cast<double>(c.freq * c.surface.size());
  std::vector<Piece> out;
  out.reserve(cands.size());
  for (const auto& c : cands) {
    out.push_back({c.surface, std::log(static_cast<double>(c.freq * c.surface.size()) / total)});
  }
  return out;
}

struct LatticeStats {
  std::vector<double> expected;  // per piece
  double log_likelihood = 0.0;
};

namespace internal {

inline constexpr size_t kUnitBlock = 256;

struct Edge {
  uint32_t begin;
  uint32_t end;
  int piece;
};

inline void CollectEdges(std::u32string_view text, const PieceTrie& trie,
                         const std::vector<Piece>& pieces, std::vector<Edge>* edges) {
  edges->clear();
  for (size_t i = 0; i < text.size(); ++i) {
    trie.ForEachPrefix(text, i, [&](size_t end, int pid) {
      if (std::isfinite(pieces[pid].log_prob)) {
        edges->push_back({static_cast<uint32_t>(i), static_cast<uint32_t>(end), pid});
      }
    });
  }
}

// Forward pass; edges are sorted by begin. Edges of `skip` are ignored, and
// alpha values before `from` are taken as already computed in `alpha`.
inline double Forward(size_t n, const std::vector<Edge>& edges, const std::vector<Piece>& pieces,
                      std::vector<double>* alpha, int skip = -1) {
  const double kNeg = -std::numeric_limits<double>::infinity();
  alpha->assign(n + 1, kNeg);
  (*alpha)[0] = 0.0;
  for (const auto& e : edges) {
    if (e.piece == skip || (*alpha)[e.begin] == kNeg) continue;
    (*alpha)[e.end] = LogAddExp((*alpha)[e.end], (*alpha)[e.begin] + pieces[e.piece].log_prob);
  }
  return (*alpha)[n];
}

}  // namespace internal

// E-step over all units. Units are processed in fixed-size blocks whose
// partial sums are combined in block order, so the result is identical for
// any worker count.
inline LatticeStats ExpectedCounts(const std::vector<Piece>& pieces, const std::vector<Unit>& units,
                                   size_t workers = 1) {
  using internal::Edge;
  PieceTrie trie;
  {
    std::vector<std::u32string> s;
    s.reserve(pieces.size());
    for (const auto& p : pieces) s.push_back(p.surface);
    trie.Build(s);
  }
  const size_t nblocks = (units.size() + internal::kUnitBlock - 1) / internal::kUnitBlock;
  std::vector<LatticeStats> partial(nblocks);
  ParallelFor(nblocks, workers, [&](size_t b) {
    LatticeStats& st = partial[b];
    st.expected.assign(pieces.size(), 0.0);
    std::vector<Edge> edges;
    std::vector<double> alpha, beta;
    const size_t hi = std::min(units.size(), (b + 1) * internal::kUnitBlock);
    for (size_t u = b * internal::kUnitBlock; u < hi; ++u) {
      const auto& text = units[u].text;
      const size_t n = text.size();
      internal::CollectEdges(text, trie, pieces, &edges);
      const double z = internal::Forward(n, edges, pieces, &alpha);
      if (!std::isfinite(z)) {
        throw InvariantViolation("unit '" + EncodeUtf8(text) + "' has no segmentation");
      }
      beta.assign(n + 1, -std::numeric_limits<double>::infinity());
      beta[n] = 0.0;
      for (auto it = edges.rbegin(); it != edges.rend(); ++it) {
        beta[it->begin] = LogAddExp(beta[it->begin], pieces[it->piece].log_prob + beta[it->end]);
      }
      const auto freq = static_cast<double>(units[u].freq);
      for (const auto& e : edges) {
        const double post = std::exp(alpha[e.begin] + pieces[e.piece].log_prob + beta[e.end] - z);
        st.expected[e.piece] += freq * post;
      }
      st.log_likelihood += freq * z;
    }
  });
  LatticeStats total;
  total.expected.assign(pieces.size(), 0.0);
  for (const auto& st : partial) {
    for (size_t i = 0; i < pieces.size(); ++i) total.expected[i] += st.expected[i];
    total.log_likelihood += st.log_likelihood;
  }
  return total;
}

// Exact corpus log-likelihood under the current piece probabilities.
inline double CorpusLogLikelihood(const std::vector<Piece>& pieces, const std::vector<Unit>& units,
                                  size_t workers = 1) {
  return ExpectedCounts(pieces, units, workers).log_likelihood;
}

// Runs `iterations` EM steps in place. Returns the log-likelihood measured
// in each E-step (i.e. before that iteration's update), which is
// non-decreasing.
inline std::vector<double> EmTrain(std::vector<Piece>* pieces, const std::vector<Unit>& units,
                                   int iterations, size_t workers = 1) {
  std::vector<double> history;
  for (int it = 0; it < iterations; ++it) {
    LatticeStats st = ExpectedCounts(*pieces, units, workers);
    history.push_back(st.log_likelihood);
    double total = 0.0;
    for (double e : st.expected) total += e;
    for (size_t i = 0; i < pieces->size(); ++i) {
      (*pieces)[i].log_prob = st.expected[i] > 0.0
                                  ? std::log(st.expected[i] / total)
                                  : -std::numeric_limits<double>::infinity();
    }
  }
  return history;
}

// Likelihood lost by deleting each piece: sum over units of
// freq * (log Z - log Z without the piece), probabilities not renormalized.
// Single characters get +inf (never removable).
inline std::vector<double> PieceRemovalLoss(const std::vector<Piece>& pieces,
                                            const std::vector<Unit>& units, size_t workers = 1) {
  using internal::Edge;
  PieceTrie trie;
  {
    std::vector<std::u32string> s;
    for (const auto& p : pieces) s.push_back(p.surface);
    trie.Build(s);
  }
  const size_t nblocks = (units.size() + internal::kUnitBlock - 1) / internal::kUnitBlock;
  std::vector<std::vector<double>> partial(nblocks);
  ParallelFor(nblocks, workers, [&](size_t b) {
    auto& loss = partial[b];
    loss.assign(pieces.size(), 0.0);
    std::vector<Edge> edges;
    std::vector<double> alpha, alpha2;
    std::vector<int> present;
    const size_t hi = std::min(units.size(), (b + 1) * internal::kUnitBlock);
    for (size_t u = b * internal::kUnitBlock; u < hi; ++u) {
      const auto& text = units[u].text;
      internal::CollectEdges(text, trie, pieces, &edges);
      const double z = internal::Forward(text.size(), edges, pieces, &alpha);
      present.clear();
      for (const auto& e : edges) {
        if (pieces[e.piece].surface.size() > 1) present.push_back(e.piece);
      }
      std::sort(present.begin(), present.end());
      present.erase(std::unique(present.begin(), present.end()), present.end());
      for (int pid : present) {
        const double z2 = internal::Forward(text.size(), edges, pieces, &alpha2, pid);
        loss[pid] += static_cast<double>(units[u].freq) * (z - z2);
      }
    }
  });
  std::vector<double> total(pieces.size(), 0.0);
  for (const auto& l : partial) {
    for (size_t i = 0; i < pieces.size(); ++i) total[i] += l[i];
  }
  for (size_t i = 0; i < pieces.size(); ++i) {
    if (pieces[i].surface.size() == 1) total[i] = std::numeric_limits<double>::infinity();
  }
  return total;
}

// One pruning round: keeps all single characters plus the highest-loss
// multi-character pieces, `keep` pieces in total. Ties favour higher
// probability, then surface order. Piece order is preserved.
inline std::vector<Piece> PruneRound(const std::vector<Piece>& pieces, const std::vector<Unit>& units,
                                     size_t keep, size_t workers = 1) {
  const std::vector<double> loss = PieceRemovalLoss(pieces, units, workers);
  std::vector<size_t> order(pieces.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (loss[a] != loss[b]) return loss[a] > loss[b];
    if (pieces[a].log_prob != pieces[b].log_prob) return pieces[a].log_prob > pieces[b].log_prob;
    return pieces[a].surface < pieces[b].surface;
  });
  std::vector<bool> kept(pieces.size(), false);
  for (size_t k = 0; k < std::min(keep, order.size()); ++k) kept[order[k]] = true;
  std::vector<Piece> out;
  for (size_t i = 0; i < pieces.size(); ++i) {
    if (kept[i] || pieces[i].surface.size() == 1) out.push_back(pieces[i]);
  }
  return out;
}

inline size_t CountCharPieces(const std::vector<Piece>& pieces) {
  return static_cast<size_t>(std::count_if(pieces.begin(), pieces.end(),
                                           [](const Piece& p) { return p.surface.size() == 1; }));
}

// Shrinks to target_size pieces, re-estimating after each round.
inline std::vector<Piece> PruneVocab(std::vector<Piece> pieces, const std::vector<Unit>& units,
                                     size_t target_size, double shrink_factor = 0.75,
                                     int em_iterations = 2, size_t workers = 1) {
  const size_t nchars = CountCharPieces(pieces);
  if (target_size < nchars) {
    throw TargetBelowCharsetSize("target size " + std::to_string(target_size) +
                                 " is below the " + std::to_string(nchars) +
                                 " mandatory character pieces");
  }
  while (pieces.size() > target_size) {
    const auto shrunk = static_cast<size_t>(static_cast<double>(pieces.size()) * shrink_factor);
    const size_t keep = std::max(target_size, std::min(shrunk, pieces.size() - 1));
    pieces = PruneRound(pieces, units, keep, workers);
    EmTrain(&pieces, units, em_iterations, workers);
  }
  return pieces;
}

struct TrainerConfig {
  TokenizerMode mode = TokenizerMode::kWordSegmented;
  size_t target_size = 32000;
  size_t max_piece_len = 16;
  size_t seed_size = 200000;
  uint64_t min_char_count = 2;  // rarer characters are left to unk
  double shrink_factor = 0.75;
  int initial_em_iterations = 4;
  int em_iterations_per_round = 2;
  int final_em_iterations = 4;
  size_t workers = 1;
  SpecialTokens specials;
};

struct TrainReport {
  std::vector<double> log_likelihood;  // every E-step, in order
  size_t charset_size = 0;
  size_t seed_size = 0;
  size_t rounds = 0;
};

inline SubwordVocab TrainUnigram(const UnitCorpus& corpus, const TrainerConfig& cfg,
                                 TrainReport* report = nullptr) {
  if (corpus.empty()) throw ConfigError("tokenizer training corpus is empty");
  if (!(cfg.shrink_factor > 0.0 && cfg.shrink_factor < 1.0)) {
    throw ConfigError("shrink_factor must be in (0, 1)");
  }
  const std::vector<Unit> all = corpus.Units();
  std::map<char32_t, uint64_t> charset;
  for (const auto& [c, f] : CharCounts(all)) {
    if (f >= cfg.min_char_count) charset.emplace(c, f);
  }
  if (charset.empty()) throw ConfigError("no character reaches the coverage floor");
  if (cfg.target_size < charset.size()) {
    throw TargetBelowCharsetSize("target size " + std::to_string(cfg.target_size) +
                                 " is below the charset size " + std::to_string(charset.size()));
  }
  const std::vector<Unit> units = RestrictToCharset(all, charset);
  std::vector<Piece> pieces = InitialPieces(SeedVocab(units, cfg.max_piece_len, cfg.seed_size));
  TrainReport rep;
  rep.charset_size = charset.size();
  rep.seed_size = pieces.size();
  auto run_em = [&](int iters) {
    auto h = EmTrain(&pieces, units, iters, cfg.workers);
    rep.log_likelihood.insert(rep.log_likelihood.end(), h.begin(), h.end());
  };
  run_em(cfg.initial_em_iterations);
  while (pieces.size() > cfg.target_size) {
    const auto shrunk = static_cast<size_t>(static_cast<double>(pieces.size()) * cfg.shrink_factor);
    const size_t keep = std::max(cfg.target_size, std::min(shrunk, pieces.size() - 1));
    pieces = PruneRound(pieces, units, keep, cfg.workers);
    ++rep.rounds;
    run_em(cfg.em_iterations_per_round);
  }
  run_em(cfg.final_em_iterations);
  // Drop dead multi-character pieces, renormalize, order by probability.
  std::erase_if(pieces, [](const Piece& p) {
    return p.surface.size() > 1 && !std::isfinite(p.log_prob);
  });
  double z = -std::numeric_limits<double>::infinity();
  for (const auto& p : pieces) z = LogAddExp(z, p.log_prob);
  for (auto& p : pieces) p.log_prob -= z;
  std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
    if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
    return a.surface < b.surface;
  });
  if (report) *report = rep;
  return SubwordVocab(std::move(pieces), cfg.mode, cfg.target_size, cfg.specials);
}

}  // namespace kmtext
