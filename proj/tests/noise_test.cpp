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

#include <sstream>

#include "kmtext/noise.hpp"
#include "test_support.hpp"

namespace kmtext {
namespace {

using testing::U8;

TEST(ChunkDocument, GreedyWholeSentences) {
  const auto plan = ChunkDocument(1200, {0, 400, 800}, 1024);
  EXPECT_EQ(plan.chunks, (std::vector<ChunkRange>{{0, 800}, {800, 1200}}));
  EXPECT_EQ(plan.hard_splits, 0u);
  EXPECT_EQ(ChunkDocument(10, {0}, 1024).chunks, (std::vector<ChunkRange>{{0, 10}}));
  EXPECT_TRUE(ChunkDocument(0, {0}, 1024).chunks.empty());
}

TEST(ChunkDocument, OverlongSentenceIsHardSplit) {
  const auto plan = ChunkDocument(2000, {0}, 1024);
  EXPECT_EQ(plan.chunks, (std::vector<ChunkRange>{{0, 1024}, {1024, 2000}}));
  EXPECT_EQ(plan.hard_splits, 1u);
}

TEST(ChunkDocument, SplitsOnlyAtSentenceStartsAndCoversInput) {
  Rng rng(41);
  for (int trial = 0; trial < 2000; ++trial) {
    const size_t n_sent = 1 + rng.Uniform(20);
    std::vector<size_t> starts;
    size_t n = 0;
    for (size_t s = 0; s < n_sent; ++s) {
      starts.push_back(n);
      n += 1 + rng.Uniform(60);
    }
    const size_t budget = 20 + rng.Uniform(100);
    const auto plan = ChunkDocument(n, starts, budget);
    size_t expect_begin = 0, hard = 0;
    for (const auto& c : plan.chunks) {
      EXPECT_EQ(c.begin, expect_begin);
      EXPECT_LE(c.end - c.begin, budget);
      EXPECT_GT(c.end, c.begin);
      expect_begin = c.end;
    }
    EXPECT_EQ(expect_begin, n);
    // Every split that is not a sentence start lies inside an overlong sentence.
    for (size_t k = 1; k < plan.chunks.size(); ++k) {
      const size_t at = plan.chunks[k].begin;
      if (std::find(starts.begin(), starts.end(), at) != starts.end()) continue;
      auto it = std::upper_bound(starts.begin(), starts.end(), at);
      const size_t sb = *(it - 1), se = it == starts.end() ? n : *it;
      EXPECT_GT(se - sb, budget);
      ++hard;
    }
    EXPECT_LE(plan.hard_splits, hard + n_sent);
  }
}

TEST(SampleSpans, ZeroRatioGivesNoSpans) {
  NoiseConfig cfg;
  cfg.mask_ratio = 0.0;
  Rng rng(1);
  EXPECT_TRUE(SampleSpans(100, cfg, rng).empty());
}

TEST(SampleSpans, DisjointInRangeAndExactBudget) {
  NoiseConfig cfg;
  Rng rng(42);
  for (int i = 0; i < 5000; ++i) {
    const size_t n = 1 + rng.Uniform(80);
    cfg.mask_ratio = rng.UniformReal();
    const auto spans = SampleSpans(n, cfg, rng);
    EXPECT_NO_THROW(CheckSpans(spans, n));
    size_t total = 0;
    for (const auto& s : spans) total += s.length;
    EXPECT_EQ(total, static_cast<size_t>(std::llround(cfg.mask_ratio * static_cast<double>(n))));
    for (size_t k = 1; k < spans.size(); ++k) EXPECT_LT(spans[k - 1].start, spans[k].start);
  }
}

TEST(SampleSpans, MaskedFractionAndSpanLengthStatistics) {
  NoiseConfig cfg;
  Rng rng = Rng::Keyed(43, "spans", 0);
  double masked = 0;
  std::vector<size_t> drawn;
  const int sentences = 10000;
  for (int i = 0; i < sentences; ++i) {
    for (const auto& s : SampleSpans(100, cfg, rng, &drawn)) masked += static_cast<double>(s.length);
  }
  const double frac = masked / (100.0 * sentences);
  EXPECT_GE(frac, 0.33);
  EXPECT_LE(frac, 0.37);
  double sum = 0;
  for (size_t d : drawn) sum += static_cast<double>(d);
  const double analytic = 3.5 / (1 - std::exp(-3.5));
  EXPECT_NEAR(analytic, 3.607, 0.005);  // 3.6090 exactly
  EXPECT_NEAR(sum / static_cast<double>(drawn.size()), analytic, 0.2);
}

TEST(ApplyMask, ReplacesEachSpanWithOneMask) {
  std::vector<std::string> w;
  for (int i = 0; i < 10; ++i) w.push_back("w" + std::to_string(i));
  EXPECT_EQ(ApplyMask(w, {}, std::string("M")), w);
  EXPECT_EQ(ApplyMask(w, {{2, 3}}, std::string("M")),
            (std::vector<std::string>{"w0", "w1", "M", "w5", "w6", "w7", "w8", "w9"}));
  EXPECT_EQ(ApplyMask(w, {{2, 2}, {4, 1}}, std::string("M")),
            (std::vector<std::string>{"w0", "w1", "M", "M", "w5", "w6", "w7", "w8", "w9"}));
  EXPECT_THROW(ApplyMask(w, {{2, 3}, {4, 1}}, std::string("M")), OverlappingSpans);
  EXPECT_THROW(ApplyMask(w, {{8, 3}}, std::string("M")), OverlappingSpans);
}

class MakePairsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    lex_ = testing::DefaultLexicon();
    const auto words = testing::LexiconWords(lex_);
    Rng rng(44);
    UnitCorpus corpus;
    for (int i = 0; i < 200; ++i) {
      std::u32string text;
      for (uint64_t s = 0, ns = 1 + rng.Uniform(5); s < ns; ++s) {
        text += testing::FuzzText(rng, words, 5 + rng.Uniform(20));
        text += U"។ ";
      }
      docs_.push_back(SegmentWords(Normalize(std::u32string_view(text)), lex_));
      corpus.AddTokens(docs_.back(), TokenizerMode::kWordSegmented);
    }
    TrainerConfig tc;
    tc.target_size = 300;
    tc.min_char_count = 1;
    vocab_ = TrainUnigram(corpus, tc);
  }

  Lexicon lex_;
  std::vector<std::vector<Token>> docs_;
  SubwordVocab vocab_;
};

TEST_F(MakePairsTest, ZeroRatioCopiesTarget) {
  NoiseConfig cfg;
  cfg.mask_ratio = 0.0;
  for (size_t d = 0; d < docs_.size(); ++d) {
    for (const auto& p : MakePairs("d" + std::to_string(d), Lang::kKm, docs_[d], vocab_, cfg)) {
      EXPECT_EQ(p.source_ids, p.target_ids);
    }
  }
}

TEST_F(MakePairsTest, DeterministicPerSeed) {
  NoiseConfig cfg;
  cfg.rng_seed = 99;
  for (size_t d = 0; d < docs_.size(); ++d) {
    const auto a = MakePairs("d" + std::to_string(d), Lang::kKm, docs_[d], vocab_, cfg);
    const auto b = MakePairs("d" + std::to_string(d), Lang::kKm, docs_[d], vocab_, cfg);
    EXPECT_EQ(a, b);
  }
}

TEST_F(MakePairsTest, PairInvariantsUnderSmallBudget) {
  NoiseConfig cfg;
  cfg.max_seq_len = 24;
  cfg.rng_seed = 5;
  const int mask = vocab_.mask_id();
  for (size_t d = 0; d < docs_.size(); ++d) {
    NoiseStats stats;
    const auto pairs = MakePairs("d" + std::to_string(d), Lang::kEn, docs_[d], vocab_, cfg, &stats);
    std::string rebuilt;
    for (const auto& p : pairs) {
      EXPECT_LE(p.source_ids.size(), cfg.max_seq_len);
      EXPECT_LE(p.target_ids.size(), cfg.max_seq_len);
      EXPECT_EQ(std::count(p.target_ids.begin(), p.target_ids.end(), mask), 0);
      const auto n_masks = static_cast<size_t>(std::count(p.source_ids.begin(), p.source_ids.end(), mask));
      EXPECT_LE(p.source_ids.size(), p.target_ids.size() + n_masks);
      ASSERT_GE(p.target_ids.size(), 2u);
      EXPECT_EQ(p.target_ids[p.target_ids.size() - 2], vocab_.eos_id());
      EXPECT_EQ(p.target_ids.back(), vocab_.lang_id("<2en>"));
      const std::vector<int> body(p.target_ids.begin(), p.target_ids.end() - 2);
      const std::string target_text = vocab_.Decode(body);
      rebuilt += target_text;
      // Unmasked material appears in the target, in order.
      size_t pos = 0;
      std::vector<int> run;
      auto check_run = [&] {
        if (run.empty()) return;
        const std::string piece = vocab_.Decode(run);
        const size_t at = target_text.find(piece, pos);
        EXPECT_NE(at, std::string::npos);
        if (at != std::string::npos) pos = at + piece.size();
        run.clear();
      };
      for (size_t k = 0; k + 2 < p.source_ids.size(); ++k) {
        if (p.source_ids[k] == mask) check_run();
        else run.push_back(p.source_ids[k]);
      }
      check_run();
    }
    EXPECT_EQ(rebuilt, Detokenize(docs_[d]));
    EXPECT_EQ(stats.chunks, pairs.size());
  }
}

TEST_F(MakePairsTest, BinaryFormatRoundTrip) {
  NoiseConfig cfg;
  std::vector<TrainingPair> all;
  for (size_t d = 0; d < 20; ++d) {
    for (auto& p : MakePairs("doc/" + std::to_string(d), Lang::kKm, docs_[d], vocab_, cfg)) all.push_back(p);
  }
  std::stringstream buf;
  WritePairHeader(buf);
  for (const auto& p : all) WritePairRecord(p, buf);
  EXPECT_EQ(ReadPairs(buf), all);
  std::stringstream bad("XXXX");
  EXPECT_THROW(ReadPairs(bad), IngestionError);
  std::string truncated;
  {
    std::stringstream b2;
    WritePairHeader(b2);
    WritePairRecord(all.front(), b2);
    truncated = b2.str();
    truncated.pop_back();
  }
  std::stringstream b3(truncated);
  EXPECT_THROW(ReadPairs(b3), IngestionError);
}

TEST(NoiseConfig, Validation) {
  NoiseConfig cfg;
  EXPECT_NO_THROW(cfg.Validate());
  cfg.mask_ratio = 1.5;
  EXPECT_THROW(cfg.Validate(), ConfigError);
  cfg = {};
  cfg.poisson_lambda = 0;
  EXPECT_THROW(cfg.Validate(), ConfigError);
  cfg = {};
  cfg.max_seq_len = 2;
  EXPECT_THROW(cfg.Validate(), ConfigError);
}

TEST(SentenceStartTokens, AlignsWithSentenceSplitter) {
  const Lexicon lex = testing::DefaultLexicon();
  const auto tokens = SegmentWords(std::string_view("ខ្ញុំមាន។ យើងរៀន។ Hello there. Ok"), lex);
  const auto starts = SentenceStartTokens(tokens);
  ASSERT_EQ(starts.size(), 4u);
  EXPECT_EQ(starts[0], 0u);
  for (size_t k = 1; k < starts.size(); ++k) EXPECT_TRUE(tokens[starts[k]].IsSpace());
}

}  // namespace
}  // namespace kmtext
