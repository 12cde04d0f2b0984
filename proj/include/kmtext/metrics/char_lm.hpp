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

// Character n-gram language model for corpus-quality analysis.
//
// Each line is one sentence, padded on the left with order-1 <s> symbols
// and closed with </s>. The default estimator is interpolated modified
// Kneser-Ney: the top order uses raw counts, lower orders use continuation
// counts, and each order has three discounts from its count-of-counts.
// When those statistics are degenerate (tiny corpora) the model falls back
// to add-k on the full history.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kmtext/error.hpp"
#include "kmtext/unicode.hpp"

namespace kmtext::metrics {

enum class Smoothing : uint8_t { kKneserNey = 0, kAddK = 1 };

struct CharLmConfig {
  int order = 5;
  Smoothing smoothing = Smoothing::kKneserNey;
  double add_k = 1.0;  // used by kAddK and by the fallback
};

// Private-use codepoints stand in for the markers inside n-gram keys.
inline constexpr char32_t kBos = 0x10FFFD;
inline constexpr char32_t kEos = 0x10FFFE;
inline constexpr char32_t kUnk = 0x10FFFF;

// Discounts for an order whose count-of-counts cannot support the
// modified Kneser-Ney estimate.
inline constexpr std::array<double, 3> kFallbackDiscounts = {0.5, 1.0, 1.5};

class CharLm {
 public:
  CharLm() = default;

  static CharLm Train(const std::vector<std::string>& lines, const CharLmConfig& cfg = {}) {
    if (cfg.order < 1) throw ConfigError("char LM order must be >= 1");
    CharLm lm;
    lm.cfg_ = cfg;
    lm.counts_.assign(cfg.order, {});
    bool any = false;
    for (const auto& line : lines) {
      const std::u32string seq = lm.Pad(DecodeUtf8(line), /*map_unknown=*/false);
      any = true;
      for (size_t i = cfg.order - 1; i < seq.size(); ++i) {
        ++lm.counts_[cfg.order - 1][seq.substr(i + 1 - cfg.order, cfg.order)];
        lm.vocab_.insert(seq[i]);
      }
    }
    if (!any) throw ConfigError("char LM training corpus is empty");
    lm.vocab_.insert(kEos);
    lm.vocab_.insert(kUnk);
    lm.Finalize();
    return lm;
  }

  int order() const { return cfg_.order; }
  Smoothing smoothing() const { return effective_; }
  size_t vocab_size() const { return vocab_.size(); }
  const std::vector<std::array<double, 3>>& discounts() const { return discounts_; }

  // P(w | history); the history is truncated to order-1 symbols. Unseen
  // symbols are mapped to <unk>.
  double Prob(std::u32string_view history, char32_t w) const {
    if (!vocab_.count(w)) w = kUnk;
    std::u32string h(history.size() >= static_cast<size_t>(cfg_.order - 1)
                         ? history.substr(history.size() - (cfg_.order - 1))
                         : history);
    for (char32_t& c : h) {
      if (c != kBos && !vocab_.count(c)) c = kUnk;
    }
    if (effective_ == Smoothing::kAddK) return AddKProb(h, w);
    return KnProb(h, w);
  }

  // exp(-mean log p) over every character and </s> of every line.
  double Perplexity(const std::vector<std::string>& lines) const {
    double nll = 0.0;
    size_t n = 0;
    for (const auto& line : lines) {
      const std::u32string seq = Pad(DecodeUtf8(line), true);
      for (size_t i = cfg_.order - 1; i < seq.size(); ++i) {
        const std::u32string_view hist = std::u32string_view(seq).substr(i + 1 - cfg_.order, cfg_.order - 1);
        const double p = Prob(hist, seq[i]);
        if (!(p > 0.0)) {
          throw UnseenSymbol("zero probability for " + FormatCodepoint(seq[i]) + " without smoothing");
        }
        nll -= std::log(p);
        ++n;
      }
    }
    return n == 0 ? 1.0 : std::exp(nll / static_cast<double>(n));
  }

  // Symbols that can be predicted: all training characters, </s>, <unk>.
  std::vector<char32_t> Vocabulary() const { return {vocab_.begin(), vocab_.end()}; }

  // Binary layout: "KMLM", u8 version, u8 order, u8 smoothing, f64 add_k,
  // u32 vocab size, vocab codepoints (u32), then for the top order a u64
  // entry count and (order u32 codepoints, u64 count) entries.
  void Save(std::ostream& out) const {
    out.write("KMLM", 4);
    out.put(1);
    out.put(static_cast<char>(cfg_.order));
    out.put(static_cast<char>(cfg_.smoothing));
    Put(out, cfg_.add_k);
    const std::vector<char32_t> v = Vocabulary();
    Put(out, static_cast<uint32_t>(v.size()));
    for (char32_t c : v) Put(out, static_cast<uint32_t>(c));
    const auto sorted = std::map<std::u32string, uint64_t>(counts_.back().begin(), counts_.back().end());
    Put(out, static_cast<uint64_t>(sorted.size()));
    for (const auto& [g, c] : sorted) {
      for (char32_t ch : g) Put(out, static_cast<uint32_t>(ch));
      Put(out, c);
    }
  }

  static CharLm Load(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::string_view(magic, 4) != "KMLM" || in.get() != 1) {
      throw IngestionError("not a kmtext char LM file", 0);
    }
    CharLm lm;
    lm.cfg_.order = in.get();
    lm.cfg_.smoothing = static_cast<Smoothing>(in.get());
    lm.cfg_.add_k = Get<double>(in);
    const auto nv = Get<uint32_t>(in);
    for (uint32_t i = 0; i < nv; ++i) lm.vocab_.insert(static_cast<char32_t>(Get<uint32_t>(in)));
    lm.counts_.assign(lm.cfg_.order, {});
    const auto ng = Get<uint64_t>(in);
    for (uint64_t i = 0; i < ng; ++i) {
      std::u32string g;
      for (int k = 0; k < lm.cfg_.order; ++k) g += static_cast<char32_t>(Get<uint32_t>(in));
      lm.counts_.back()[g] = Get<uint64_t>(in);
    }
    if (!in) throw IngestionError("truncated char LM file", 0);
    lm.Finalize();
    return lm;
  }

  // Text dump: "order\tngram\tcount" per line, orders ascending, n-grams
  // sorted; markers are written as <s>, </s>, <unk>.
  void DumpText(std::ostream& out) const {
    out << "#kmtext-charlm\torder=" << cfg_.order << "\tsmoothing="
        << (effective_ == Smoothing::kKneserNey ? "kneser-ney" : "add-k") << "\n";
    for (int n = 1; n <= cfg_.order; ++n) {
      const std::map<std::u32string, uint64_t> sorted(counts_[n - 1].begin(), counts_[n - 1].end());
      for (const auto& [g, c] : sorted) {
        std::string s;
        for (char32_t ch : g) {
          if (ch == kBos) s += "<s>";
          else if (ch == kEos) s += "</s>";
          else if (ch == kUnk) s += "<unk>";
          else AppendUtf8(ch, &s);
        }
        out << n << '\t' << s << '\t' << c << '\n';
      }
    }
  }

 private:
  struct Context {
    uint64_t total = 0;
    uint64_t n1 = 0, n2 = 0, n3p = 0;
  };

  template <typename T>
  static void Put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  template <typename T>
  static T Get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
  }

  std::u32string Pad(std::u32string_view line, bool map_unknown) const {
    std::u32string seq(cfg_.order - 1, kBos);
    for (char32_t c : line) {
      if (c == U'\n' || c == U'\r') continue;
      seq += (map_unknown && !vocab_.count(c)) ? kUnk : c;
    }
    seq += kEos;
    return seq;
  }

  // Derives lower-order continuation counts, context statistics and
  // discounts from the top-order counts.
  void Finalize() {
    const int N = cfg_.order;
    for (int n = N - 1; n >= 1; --n) {
      counts_[n - 1].clear();
      for (const auto& [g, c] : counts_[n]) ++counts_[n - 1][g.substr(1)];
    }
    contexts_.assign(N, {});
    discounts_.assign(N, {0.0, 0.0, 0.0});
    int degenerate_orders = 0;
    for (int n = 1; n <= N; ++n) {
      std::array<uint64_t, 5> coc{};
      for (const auto& [g, c] : counts_[n - 1]) {
        Context& ctx = contexts_[n - 1][g.substr(0, n - 1)];
        ctx.total += c;
        if (c == 1) ++ctx.n1;
        else if (c == 2) ++ctx.n2;
        else ++ctx.n3p;
        if (c <= 4) ++coc[c];
      }
      auto& d = discounts_[n - 1];
      bool ok = coc[1] > 0 && coc[2] > 0 && coc[3] > 0 && coc[4] > 0;
      if (ok) {
        const double y = static_cast<double>(coc[1]) / (coc[1] + 2.0 * coc[2]);
        d[0] = 1.0 - 2.0 * y * coc[2] / coc[1];
        d[1] = 2.0 - 3.0 * y * coc[3] / coc[2];
        d[2] = 3.0 - 4.0 * y * coc[4] / coc[3];
        for (int k = 0; k < 3; ++k) ok = ok && d[k] > 0.0 && d[k] < k + 1.0;
      }
      if (!ok) {
        d = kFallbackDiscounts;
        ++degenerate_orders;
      }
    }
    effective_ = (cfg_.smoothing == Smoothing::kAddK || degenerate_orders == N) ? Smoothing::kAddK
                                                                                : Smoothing::kKneserNey;
  }

  double AddKProb(const std::u32string& h, char32_t w) const {
    const int n = static_cast<int>(h.size()) + 1;
    const auto& table = counts_[n - 1];
    uint64_t c = 0, total = 0;
    if (auto it = table.find(h + w); it != table.end()) c = it->second;
    if (auto it = contexts_[n - 1].find(h); it != contexts_[n - 1].end()) total = it->second.total;
    const double v = static_cast<double>(vocab_.size());
    const double denom = static_cast<double>(total) + cfg_.add_k * v;
    if (denom == 0.0) return cfg_.add_k == 0.0 ? 0.0 : 1.0 / v;
    return (static_cast<double>(c) + cfg_.add_k) / denom;
  }

  // Interpolated estimate at order |h| + 1.
  double KnProb(std::u32string_view h, char32_t w) const {
    const size_t n = h.size() + 1;
    const double lower = h.empty() ? 1.0 / static_cast<double>(vocab_.size())
                                   : KnProb(h.substr(1), w);
    auto cit = contexts_[n - 1].find(std::u32string(h));
    if (cit == contexts_[n - 1].end()) return lower;
    const Context& ctx = cit->second;
    const auto& d = discounts_[n - 1];
    uint64_t c = 0;
    std::u32string key(h);
    key += w;
    if (auto it = counts_[n - 1].find(key); it != counts_[n - 1].end()) c = it->second;
    const double disc = c == 0 ? 0.0 : d[std::min<uint64_t>(c, 3) - 1];
    const double total = static_cast<double>(ctx.total);
    const double gamma = (d[0] * ctx.n1 + d[1] * ctx.n2 + d[2] * ctx.n3p) / total;
    return (static_cast<double>(c) - disc) / total + gamma * lower;
  }

  CharLmConfig cfg_;
  Smoothing effective_ = Smoothing::kKneserNey;
  std::set<char32_t> vocab_;
  std::vector<std::unordered_map<std::u32string, uint64_t>> counts_;
  std::vector<std::unordered_map<std::u32string, Context>> contexts_;
  std::vector<std::array<double, 3>> discounts_;
};

}  // namespace kmtext::metrics
