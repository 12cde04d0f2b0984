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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "kmtext/metrics/bleu.hpp"
#include "kmtext/metrics/bootstrap.hpp"
#include "kmtext/metrics/chrf.hpp"
#include "kmtext/metrics/delta_s.hpp"
#include "kmtext/metrics/rouge.hpp"
#include "kmtext/metrics/scaling.hpp"
#include "kmtext/metrics/summarize.hpp"
#include "kmtext/metrics/tokenizer_stats.hpp"
#include "test_support.hpp"

namespace kmtext::metrics {
namespace {

using testing::DefaultLexicon;
using testing::U8;

constexpr double kTol = 1e-9;

// Reference values produced by sacrebleu 2.3.1 with default settings.
struct Golden {
  const char* name;
  std::vector<std::string> hyps;
  std::vector<std::string> refs;
  double bleu;
  double chrf;
};

std::vector<Golden> GoldenCases() {
  return {
      {"identity", {"the cat sat on the mat"}, {"the cat sat on the mat"}, 100.0, 100.0},
      {"disjoint", {"a b c"}, {"x y z"}, 0.0, 0.0},
      {"clipped", {"the the the"}, {"the cat"}, 0.0, 19.689903800721968},
      {"unigram_only", {"the cat sat"}, {"the dog ran"}, 0.0, 13.955026455026454},
      {"brevity", {"the cat"}, {"the cat sat on the mat"}, 0.0, 27.25331540542631},
      {"punct_13a",
       {"Hello, world! It's 3.5 km."},
       {"Hello world, it's 3.5km!"},
       7.809849842300637,
       55.65846460750914},
      {"chars", {"abcd"}, {"abce"}, 0.0, 47.91666666666667},
      {"khmer",
       {"ខ្ញុំ ▁ មាន បំណង"},
       {"ខ្ញុំ មាន ▁ បំណង"},
       22.59005009024613,
       45.10942760942761},
      {"corpus",
       {"the quick brown fox", "jumps over", "a lazy dog today"},
       {"the quick brown fox jumps", "jumps over it", "the lazy dog"},
       55.62833249555186,
       72.45179741368374},
      {"empty_hyp", {""}, {"some reference words"}, 0.0, 0.0},
  };
}

TEST(Golden, BleuMatchesReference) {
  for (const auto& g : GoldenCases()) {
    EXPECT_NEAR(CorpusBleu(g.hyps, g.refs).score, g.bleu, kTol) << g.name;
    EXPECT_NEAR(BleuMetric().Score(g.hyps, g.refs), g.bleu, kTol) << g.name;
  }
}

TEST(Golden, ChrfMatchesReference) {
  for (const auto& g : GoldenCases()) {
    EXPECT_NEAR(CorpusChrf(g.hyps, g.refs), g.chrf, kTol) << g.name;
    EXPECT_NEAR(ChrfMetric().Score(g.hyps, g.refs), g.chrf, kTol) << g.name;
  }
}

TEST(Golden, BleuComponents) {
  const auto punct = CorpusBleu({"Hello, world! It's 3.5 km."}, {"Hello world, it's 3.5km!"});
  const std::vector<double> want = {50.0, 7.142857142857143, 4.166666666666667, 2.5};
  ASSERT_EQ(punct.precisions.size(), 4u);
  for (size_t i = 0; i < 4; ++i) EXPECT_NEAR(punct.precisions[i], want[i], kTol);

  const auto clipped = CorpusBleu({"the the the"}, {"the cat"});
  EXPECT_NEAR(clipped.precisions[0], 100.0 / 3.0, kTol);

  EXPECT_NEAR(CorpusBleu({"the cat"}, {"the cat sat on the mat"}).bp, 0.1353352832366127, kTol);
  EXPECT_NEAR(CorpusBleu({"the quick brown fox", "jumps over", "a lazy dog today"},
                         {"the quick brown fox jumps", "jumps over it", "the lazy dog"})
                  .bp,
              0.9048374180359595, kTol);
}

TEST(Tokenize13a, SplitsPunctuationButNotNumbers) {
  auto join = [](const std::vector<std::u32string>& v) {
    std::string out;
    for (const auto& t : v) out += (out.empty() ? "" : "|") + U8(t);
    return out;
  };
  EXPECT_EQ(join(Tokenize13a("Hello, world! It's 3.5 km.")), "Hello|,|world|!|It's|3.5|km|.");
  EXPECT_EQ(join(Tokenize13a("a,b 1,000 x-y")), "a|,|b|1,000|x-y");
  EXPECT_EQ(join(Tokenize13a("  spaced\tout  ")), "spaced|out");
  EXPECT_EQ(join(Tokenize13a("&quot;q&quot;")), "\"|q|\"");
  EXPECT_TRUE(Tokenize13a("").empty());
}

// Character n-gram F-beta computed by direct counting of every n-gram.
double BruteChrf(const std::string& hyp, const std::string& ref, int max_n = 6, double beta = 2.0) {
  auto strip = [](const std::string& s) {
    std::u32string out;
    for (char32_t c : DecodeUtf8(s)) {
      if (c != U' ') out += c;
    }
    return out;
  };
  const std::u32string h = strip(hyp), r = strip(ref);
  double prec = 0, rec = 0;
  int effective = 0;
  for (int n = 1; n <= max_n; ++n) {
    std::map<std::u32string, int> hc, rc;
    for (size_t i = 0; i + n <= h.size(); ++i) ++hc[h.substr(i, n)];
    for (size_t i = 0; i + n <= r.size(); ++i) ++rc[r.substr(i, n)];
    int h_total = 0, r_total = 0, match = 0;
    for (auto& [g, c] : hc) {
      h_total += c;
      match += std::min(c, rc.count(g) ? rc[g] : 0);
    }
    for (auto& [g, c] : rc) r_total += c;
    if (h_total > 0 && r_total > 0) {
      prec += static_cast<double>(match) / h_total;
      rec += static_cast<double>(match) / r_total;
      ++effective;
    }
  }
  if (effective == 0) return 0.0;
  prec /= effective;
  rec /= effective;
  if (prec + rec == 0) return 0.0;
  const double b2 = beta * beta;
  return 100.0 * (1 + b2) * prec * rec / (b2 * prec + rec);
}

TEST(Chrf, AgreesWithDirectCounting) {
  EXPECT_NEAR(CorpusChrf({"abcd"}, {"abce"}), BruteChrf("abcd", "abce"), kTol);
  EXPECT_NEAR(CorpusChrf({"the cat sat"}, {"the dog ran"}), BruteChrf("the cat sat", "the dog ran"), kTol);
  EXPECT_NEAR(CorpusChrf({"abcdefgh"}, {"abcdefgh"}), 100.0, kTol);
}

TEST(Chrf, IgnoresSpaces) {
  EXPECT_NEAR(CorpusChrf({"ab cd"}, {"abce"}), CorpusChrf({"abcd"}, {"abc e"}), kTol);
  EXPECT_NEAR(CorpusChrf({"t h e cat"}, {"the c a t"}), 100.0, kTol);
}

TEST(Corpus, LengthMismatchThrows) {
  EXPECT_THROW(CorpusBleu({"a"}, {"a", "b"}), LengthMismatch);
  EXPECT_THROW(CorpusChrf({"a", "b"}, {"a"}), LengthMismatch);
  EXPECT_THROW(ChrfMetric().Score({"a"}, {}), LengthMismatch);
}

TEST(RougeL, HandComputed) {
  const auto s = RougeL({"a", "b", "c", "d"}, {"a", "c", "d"});
  EXPECT_NEAR(s.precision, 0.75, kTol);
  EXPECT_NEAR(s.recall, 1.0, kTol);
  EXPECT_NEAR(s.f, 6.0 / 7.0, kTol);
  EXPECT_NEAR(RougeL({"x"}, {"y"}).f, 0.0, kTol);
  EXPECT_NEAR(RougeL({}, {"y"}).f, 0.0, kTol);
  EXPECT_THROW(RougeL({"x"}, {}), EmptyReference);
}

// Textbook full-table LCS.
size_t TableLcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<size_t>> t(a.size() + 1, std::vector<size_t>(b.size() + 1, 0));
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
    }
  }
  return t[a.size()][b.size()];
}

TEST(RougeL, LcsAgreesWithTableOnRandomSequences) {
  Rng rng(42);
  for (int trial = 0; trial < 500; ++trial) {
    auto gen = [&] {
      std::vector<std::string> v(rng.Uniform(51));
      for (auto& t : v) t = std::string(1, static_cast<char>('a' + rng.Uniform(5)));
      return v;
    };
    const auto a = gen(), b = gen();
    EXPECT_EQ(LcsLength(a, b), TableLcs(a, b));
    if (!b.empty()) {
      const double lcs = static_cast<double>(TableLcs(a, b));
      const double p = a.empty() ? 0.0 : lcs / a.size();
      const double r = lcs / b.size();
      const double f = p + r == 0 ? 0.0 : 2 * p * r / (p + r);
      EXPECT_NEAR(RougeL(a, b).f, f, kTol);
    }
  }
}

TEST(RougeL, CorpusIsMeanOfSegments) {
  const auto m = CorpusRougeL({{"a", "b", "c", "d"}, {"x"}}, {{"a", "c", "d"}, {"x"}});
  EXPECT_NEAR(m.f, (6.0 / 7.0 + 1.0) / 2.0, kTol);
  EXPECT_NEAR(RougeLMetric().Score({"a b c d", "x"}, {"a c d", "x"}), 100.0 * m.f, kTol);
}

TEST(DeltaS, ZeroWhenNoSpaces) {
  const Lexicon lex = DefaultLexicon();
  const std::vector<std::string> hyps = {"ខ្ញុំមានបំណង", "យើងរៀនភាសាខ្មែរ"};
  const std::vector<std::string> refs = {"ខ្ញុំមានបំណង", "យើងរៀនភាសា"};
  for (const auto& metric : {BleuMetric(), ChrfMetric()}) {
    const auto rep = DeltaS(hyps, refs, metric, lex);
    EXPECT_NEAR(rep.delta_s, 0.0, kTol) << metric.name;
  }
}

TEST(DeltaS, PartialSpaceMatchesReference) {
  const Lexicon lex = DefaultLexicon();
  const std::vector<std::string> hyps = {"ខ្ញុំ មានបំណង"};
  const std::vector<std::string> refs = {"ខ្ញុំ មាន បំណង"};
  const auto views_h = PrepareForEval(hyps, lex);
  const auto views_r = PrepareForEval(refs, lex);
  EXPECT_EQ(views_h.all[0], "ខ្ញុំ ▁ មាន បំណង");
  EXPECT_EQ(views_r.all[0], "ខ្ញុំ ▁ មាន ▁ បំណង");
  EXPECT_EQ(views_h.content, views_r.content);

  const auto chrf = DeltaS(hyps, refs, ChrfMetric(), lex);
  EXPECT_NEAR(chrf.s_content, 100.0, kTol);
  EXPECT_NEAR(chrf.s_all, 69.61895838794734, kTol);
  EXPECT_NEAR(chrf.delta_s, 69.61895838794734 - 100.0, kTol);
  EXPECT_EQ(chrf.delta_s, chrf.s_all - chrf.s_content);

  const auto bleu = DeltaS(hyps, refs, BleuMetric(), lex);
  EXPECT_NEAR(bleu.s_all, 49.76093899250716, kTol);
  // Three content tokens leave no 4-gram, so the reference scorer gives 0.
  EXPECT_NEAR(bleu.s_content, 0.0, kTol);
  EXPECT_THROW(DeltaS(hyps, {}, BleuMetric(), lex), LengthMismatch);
}

std::vector<std::string> RandomSentences(Rng& rng, size_t n) {
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) {
    std::string s;
    for (int w = 0; w < 8; ++w) s += (s.empty() ? "" : " ") + std::string("w") + std::to_string(rng.Uniform(50));
    out.push_back(s);
  }
  return out;
}

TEST(Bootstrap, PerfectBeatsRandom) {
  Rng rng(3);
  const auto refs = RandomSentences(rng, 200);
  const auto noise = RandomSentences(rng, 200);
  for (const auto& metric : {BleuMetric(), ChrfMetric(), RougeLMetric()}) {
    const auto r = PairedBootstrap(refs, noise, refs, metric, 1000, 9);
    EXPECT_EQ(r.winner, 0) << metric.name;
    EXPECT_LT(r.p_value, 0.01) << metric.name;
    const auto swapped = PairedBootstrap(noise, refs, refs, metric, 1000, 9);
    EXPECT_EQ(swapped.winner, 1);
    EXPECT_EQ(swapped.p_value, r.p_value);
  }
}

TEST(Bootstrap, IdenticalSystemsAreNotSignificant) {
  Rng rng(4);
  const auto refs = RandomSentences(rng, 50);
  const auto hyp = RandomSentences(rng, 50);
  const auto r = PairedBootstrap(hyp, hyp, refs, ChrfMetric(), 200, 1);
  EXPECT_GE(r.p_value, 0.5);
  EXPECT_EQ(r.winner, -1);
}

TEST(Bootstrap, DeterministicPerSeed) {
  Rng rng(5);
  const auto refs = RandomSentences(rng, 40);
  auto a = refs;
  auto b = RandomSentences(rng, 40);
  for (size_t i = 0; i < 40; i += 2) b[i] = refs[i];
  for (size_t i = 1; i < 40; i += 3) a[i] = b[i];
  const auto r1 = PairedBootstrap(a, b, refs, BleuMetric(), 300, 77);
  const auto r2 = PairedBootstrap(a, b, refs, BleuMetric(), 300, 77);
  EXPECT_EQ(r1.p_value, r2.p_value);
  EXPECT_EQ(r1.score_a, r2.score_a);
  EXPECT_GE(r1.p_value, 0.0);
  EXPECT_LE(r1.p_value, 1.0);
}

TEST(Bootstrap, RejectsBadInput) {
  EXPECT_THROW(PairedBootstrap({"a", "b"}, {"a"}, {"a", "b"}, BleuMetric()), LengthMismatch);
  EXPECT_THROW(PairedBootstrap({"a"}, {"a"}, {"a"}, BleuMetric()), ConfigError);
  EXPECT_THROW(PairedBootstrap({"a", "b"}, {"a", "b"}, {"a", "b"}, BleuMetric(), 0), ConfigError);
}

TEST(Summarize, Lead3AndOracle) {
  EXPECT_EQ(Lead3({"A. ", "B. ", "C. ", "D."}), "A. B. C. ");
  EXPECT_EQ(Lead3({"only."}), "only.");
  EXPECT_EQ(Lead3({}), "");

  const std::vector<std::vector<std::string>> article = {
      {"the", "weather", "was", "cold"},
      {"prices", "rose", "in", "the", "market"},
      {"the", "market", "fell", "today"},
      {"prices", "rose", "in", "the", "market"},
  };
  EXPECT_EQ(OracleSentence(article, {"prices", "rose", "in", "the", "market"}), 1u);
  EXPECT_EQ(OracleSentence(article, {"weather", "cold"}), 0u);
  EXPECT_EQ(OracleSentence(article, {"zzz"}), 0u);
  EXPECT_THROW(OracleSentence({}, {"x"}), EmptyArticle);
}

TEST(TokenizerStats, Fertility) {
  EXPECT_NEAR(Fertility({{1}, {2}, {3}}), 1.0, kTol);
  EXPECT_NEAR(Fertility({{1, 2, 3}, {1, 2, 3, 4, 5}}), 4.0, kTol);
  EXPECT_EQ(Fertility({}), 0.0);
}

SubwordVocab UniformVocab(const std::vector<std::u32string>& surfaces) {
  std::vector<Piece> pieces;
  for (const auto& s : surfaces) pieces.push_back({s, -1.0});
  return SubwordVocab(pieces, TokenizerMode::kWordSegmented);
}

TEST(TokenizerStats, LengthRatio) {
  const auto vocab = UniformVocab({U"a", U"b", U"c", U"d", U"abc", U"dab", U"cd"});
  const std::vector<Token> tokens = {{"abcdabcd", TokenKind::kWord}, {" ", TokenKind::kFunctionalSpace},
                                     {"cd", TokenKind::kWord}};
  const auto ids = vocab.Encode(tokens);
  const auto counts = CountLengths("abcdabcd cd", ids, vocab);
  EXPECT_EQ(counts.characters, 10u);
  EXPECT_EQ(counts.pieces, 4u);  // abc dab cd | cd
  EXPECT_NEAR(LengthRatio({counts}), 0.4, kTol);
  EXPECT_NEAR(LengthRatio({{3, 10}}), 0.3, kTol);
  EXPECT_NEAR(LengthRatio({{3, 10}, {1, 10}}), 0.2, kTol);
  EXPECT_EQ(LengthRatio({}), 0.0);
}

// With equal piece scores the best segmentation has the fewest pieces, so
// growing the vocabulary cannot raise the ratio.
TEST(TokenizerStats, RatioMonotoneOverNestedVocabs) {
  Rng rng(11);
  const std::u32string alphabet = U"abcd";
  for (int trial = 0; trial < 50; ++trial) {
    std::u32string text;
    for (int i = 0; i < 40; ++i) text += alphabet[rng.Uniform(4)];
    std::vector<std::u32string> surfaces = {U"a", U"b", U"c", U"d"};
    const std::vector<Token> tokens = {{U8(text), TokenKind::kWord}};
    double prev = 2.0;
    for (int grow = 0; grow < 6; ++grow) {
      const auto vocab = UniformVocab(surfaces);
      const double ratio = CountLengths(U8(text), vocab.Encode(tokens), vocab).Ratio();
      EXPECT_LE(ratio, prev + kTol);
      prev = ratio;
      for (int k = 0; k < 4; ++k) {
        const size_t start = rng.Uniform(text.size() - 4);
        const auto piece = text.substr(start, 2 + rng.Uniform(3));
        if (std::find(surfaces.begin(), surfaces.end(), piece) == surfaces.end()) surfaces.push_back(piece);
      }
    }
  }
}

TEST(Scaling, ParameterCounts) {
  const double base = static_cast<double>(ParamCount(ModelDims::Base()));
  const double big = static_cast<double>(ParamCount(ModelDims::Big()));
  EXPECT_NEAR(base / 62e6, 1.0, 0.10);
  EXPECT_NEAR(big / 211e6, 1.0, 0.10);
  EXPECT_LT(NonEmbeddingParams(ModelDims::Base()), ParamCount(ModelDims::Base()));
}

TEST(Scaling, ParameterCountByHand) {
  // One encoder layer, no decoder, d=2, ff=4, V=3, 1 position.
  const ModelDims m{1, 0, 2, 4, 1, 3, 1};
  const int64_t attention = 4 * 2 * 2 + 4 * 2;
  const int64_t ffn = 2 * 2 * 4 + 4 + 2;
  const int64_t norms = 2 * 2 * 2;
  const int64_t embed = 3 * 2 + 2 * 1 * 2;
  const int64_t side = 2 * 2 * 2 * 2;
  EXPECT_EQ(ParamCount(m), attention + ffn + norms + embed + side);
}

TEST(Scaling, FlopsByHand) {
  const ModelDims m{1, 0, 4, 8, 2, 10, 1};
  // s=1: qkv 96, qk 8, softmax 6, wv 8, out 32, ffn 128, logits 80.
  EXPECT_NEAR(FlopsPerToken(m), 3.0 * (96 + 8 + 6 + 8 + 32 + 128 + 80), kTol);
  EXPECT_GT(FlopsPerToken(ModelDims::Big()), 3.0 * FlopsPerToken(ModelDims::Base()));
  EXPECT_THROW(FlopsPerToken(ModelDims{1, 1, 10, 8, 3, 10, 1}), ConfigError);
}

TEST(Scaling, Chinchilla) {
  EXPECT_NEAR(ChinchillaOptimalParams(4.2e9), 2.1e8, 1.0);
  EXPECT_NEAR(ChinchillaOptimalParams(20.0), 1.0, kTol);
}

}  // namespace
}  // namespace kmtext::metrics
