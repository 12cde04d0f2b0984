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

#include "kmtext/curate.hpp"
#include "test_support.hpp"

namespace kmtext {
namespace {

using testing::KhmerFiller;
using testing::U8;

TEST(ProfileChars, HandCountedLiteral) {
  const CharProfile p = ProfileChars(std::string_view("abc ។៕"));
  EXPECT_EQ(p.n_chars, 6u);
  EXPECT_EQ(p.n_latin, 3u);
  EXPECT_EQ(p.n_spaces, 1u);
  EXPECT_EQ(p.n_punct, 2u);
  EXPECT_EQ(p.n_khmer, 0u);
  EXPECT_EQ(p.max_repeat_run, 1u);
}

TEST(ProfileChars, EmptyAndRuns) {
  EXPECT_EQ(ProfileChars(std::string_view("")), CharProfile{});
  const CharProfile p = ProfileChars(std::string_view("aaaaa"));
  EXPECT_EQ(p.max_repeat_run, 5u);
  EXPECT_EQ(p.max_repeat_total, 5u);
  const CharProfile q = ProfileChars(std::string_view("abababa"));
  EXPECT_EQ(q.max_repeat_run, 1u);
  EXPECT_EQ(q.max_repeat_total, 4u);
}

TEST(ApplyFilters, FixtureVerdicts) {
  const FilterConfig cfg;
  const auto cases = testing::FilterFixture();
  ASSERT_EQ(cases.size(), 60u);
  for (const auto& c : cases) {
    const FilterVerdict v = ApplyFilters(c.doc, cfg, c.lang_prob);
    EXPECT_EQ(v.kept, c.expect_kept) << c.doc.id;
    EXPECT_EQ(v.kept, !v.fired_rule.has_value());
    if (!c.expect_kept) {
      EXPECT_EQ(v.fired_rule.value_or(""), c.expect_rule) << c.doc.id;
    }
  }
}

TEST(ApplyFilters, DocumentedExamples) {
  const FilterConfig cfg;
  Document shortdoc{"a", U8(KhmerFiller(9)), Lang::kKm, ""};
  EXPECT_EQ(ApplyFilters(shortdoc, cfg, 0.99).fired_rule.value_or(""), "min_chars");
  std::u32string digits = KhmerFiller(75);
  digits += std::u32string(25, U'7');
  Document numbers{"b", U8(digits), Lang::kKm, ""};
  // The digit block is also a 25-long run; measure the number rule alone.
  FilterConfig loose = cfg;
  loose.max_repeat = 100;
  EXPECT_EQ(ApplyFilters(numbers, loose, 0.99).fired_rule.value_or(""), "number_ratio");
  Document clean{"c", U8(KhmerFiller(49) + U"។"), Lang::kKm, ""};
  EXPECT_TRUE(ApplyFilters(clean, cfg, 0.99).kept);
}

TEST(ApplyFilters, RuleOrderReportsFirstFailure) {
  // Short and full of digits: min_chars comes first.
  Document d{"x", "12345", Lang::kEn, ""};
  EXPECT_EQ(ApplyFilters(d, FilterConfig{}, 0.0).fired_rule.value_or(""), "min_chars");
}

TEST(ApplyFilters, RepeatModeTotalOccurrences) {
  FilterConfig cfg;
  cfg.repeat_mode = RepeatMode::kTotalOccurrences;
  std::u32string s;
  for (int i = 0; i < 21; ++i) s += U"កខ";
  Document d{"r", U8(s), Lang::kKm, ""};
  EXPECT_EQ(ApplyFilters(d, cfg, 0.99).fired_rule.value_or(""), "max_repeat");
  EXPECT_TRUE(ApplyFilters(d, FilterConfig{}, 0.99).kept);
}

TEST(ApplyFilters, VerdictIsAFunctionOfTheProfile) {
  for (const auto& c : testing::FilterFixture()) {
    const FilterVerdict a = ApplyFilters(c.doc, FilterConfig{}, c.lang_prob);
    const FilterVerdict b = VerdictFromProfile(ProfileChars(c.doc.text), c.doc.lang, c.lang_prob, FilterConfig{});
    EXPECT_EQ(a.kept, b.kept);
    EXPECT_EQ(a.fired_rule, b.fired_rule);
    EXPECT_EQ(a.profile, b.profile);
  }
}

TEST(ApplyFilters, TighteningAThresholdNeverKeepsMore) {
  const auto cases = testing::FilterFixture();
  auto kept = [&](const FilterConfig& cfg) {
    size_t n = 0;
    for (const auto& c : cases) n += ApplyFilters(c.doc, cfg, c.lang_prob).kept;
    return n;
  };
  const FilterConfig base;
  const size_t k0 = kept(base);
  for (int field = 0; field < 9; ++field) {
    for (double factor : {0.9, 0.5, 0.1}) {
      FilterConfig t = base;
      switch (field) {
        case 0: t.min_chars = static_cast<size_t>(base.min_chars / factor); break;
        case 1: t.max_repeat = static_cast<size_t>(base.max_repeat * factor); break;
        case 2: t.max_space_ratio *= factor; break;
        case 3: t.max_number_ratio *= factor; break;
        case 4: t.max_emoji_ratio *= factor; break;
        case 5: t.max_punct_ratio *= factor; break;
        case 6: t.max_unmatched_script_ratio *= factor; break;
        case 7: t.min_lang_prob = std::min(1.0, base.min_lang_prob / factor); break;
        case 8: t.max_repeat = static_cast<size_t>(base.max_repeat * factor); break;
      }
      EXPECT_LE(kept(t), k0) << "field " << field << " factor " << factor;
    }
  }
}

TEST(FilterConfig, ValidateRejectsOutOfRangeRatios) {
  FilterConfig cfg;
  cfg.max_punct_ratio = 0.0;
  EXPECT_THROW(cfg.Validate(), ConfigError);
  cfg = {};
  cfg.min_lang_prob = 1.5;
  EXPECT_THROW(cfg.Validate(), ConfigError);
  cfg = {};
  cfg.min_chars = 0;
  EXPECT_THROW(cfg.Validate(), ConfigError);
  EXPECT_NO_THROW(FilterConfig{}.Validate());
}

TEST(DelimiterSpaces, DetectUsesStrictRatio) {
  EXPECT_TRUE(DetectDelimiterSpaces(std::u32string_view(U"ក ខ គ ឃងចឆ")));  // 3 / 10
  EXPECT_FALSE(DetectDelimiterSpaces(std::u32string_view(U"កខគឃងចឆជឈញ")));
  EXPECT_FALSE(DetectDelimiterSpaces(std::u32string_view(U"ក ខ គឃងចឆជ")));  // exactly 2 / 10
  EXPECT_FALSE(DetectDelimiterSpaces(std::u32string_view(U"")));
}

TEST(DelimiterSpaces, StripRemovesOnlySpaces) {
  EXPECT_EQ(StripDelimiterSpaces(std::string_view("ក ខ គ")), "កខគ");
  EXPECT_EQ(StripDelimiterSpaces(std::string_view("")), "");
  Rng rng(21);
  const auto words = testing::LexiconWords(testing::DefaultLexicon());
  for (int i = 0; i < 1000; ++i) {
    const std::u32string s = testing::FuzzText(rng, words, 1 + rng.Uniform(30));
    const auto spaces = static_cast<size_t>(std::count(s.begin(), s.end(), U' '));
    const std::u32string out = StripDelimiterSpaces(std::u32string_view(s));
    EXPECT_EQ(out.size(), s.size() - spaces);
    EXPECT_EQ(std::count(out.begin(), out.end(), U' '), 0);
  }
}

TEST(IdentifyLanguage, ScriptRatioEstimator) {
  EXPECT_GT(IdentifyLanguage(std::u32string_view(KhmerFiller(40))).km, 0.9);
  EXPECT_GT(IdentifyLanguage(std::string_view("plain english words here")).en, 0.9);
  const LanguageProbs mixed = IdentifyLanguage(std::u32string_view(U"abcdកខគឃ"));
  EXPECT_GE(mixed.km, 0.4);
  EXPECT_LE(mixed.km, 0.6);
  EXPECT_GE(mixed.en, 0.4);
  EXPECT_LE(mixed.en, 0.6);
  EXPECT_THROW(IdentifyLanguage(std::string_view("123 !!")), UnknownLanguage);
}

TEST(CleanStream, RejectsShortDocumentAndKeepsOrder) {
  const std::vector<Document> docs = {
      {"1", U8(KhmerFiller(30)), Lang::kKm, ""},
      {"2", U8(KhmerFiller(5)), Lang::kKm, ""},
      {"3", U8(KhmerFiller(40, 3)), Lang::kKm, ""},
  };
  const auto r = CleanStream(docs, FilterConfig{});
  ASSERT_EQ(r.kept.size(), 2u);
  EXPECT_EQ(r.kept[0].id, "1");
  EXPECT_EQ(r.kept[1].id, "3");
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].id, "2");
  EXPECT_EQ(r.rejected[0].fired_rule, "min_chars");
}

TEST(CleanStream, RepeatedRunOfTwentyOneRejected) {
  const std::vector<Document> docs = {{"r", U8(std::u32string(21, 0x1780) + KhmerFiller(20, 1)), Lang::kKm, ""}};
  const auto r = CleanStream(docs, FilterConfig{});
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].fired_rule, "max_repeat");
}

TEST(CleanStream, DelimiterSpacesStrippedBeforeSpaceRatioRule) {
  // Ten three-letter words separated by spaces: ratio 9 / 39 > 0.2.
  std::u32string s;
  for (int i = 0; i < 10; ++i) {
    if (i) s += U' ';
    s += KhmerFiller(3, i * 3);
  }
  const std::vector<Document> docs = {{"d", U8(s), Lang::kKm, ""}};
  const auto r = CleanStream(docs, FilterConfig{});
  ASSERT_EQ(r.kept.size(), 1u);
  EXPECT_EQ(r.spaces_stripped, 1u);
  EXPECT_EQ(r.kept[0].text.find(' '), std::string::npos);
}

TEST(CleanStream, NormalizesBeforeFiltering) {
  const std::vector<Document> docs = {{"n", U8(KhmerFiller(20) + U"កេ​ី"), Lang::kKm, ""}};
  const auto r = CleanStream(docs, FilterConfig{});
  ASSERT_EQ(r.kept.size(), 1u);
  EXPECT_EQ(r.kept[0].text, U8(KhmerFiller(20) + U"កើ"));
}

TEST(CleanStream, NoKhmerDocumentRejectedForSpacesAfterRepair) {
  Rng rng(22);
  const auto words = testing::LexiconWords(testing::DefaultLexicon());
  std::vector<Document> docs;
  for (int i = 0; i < 500; ++i) {
    std::u32string s;
    for (uint64_t w = 0, n = 5 + rng.Uniform(20); w < n; ++w) {
      if (w && rng.Uniform(3) == 0) s += U' ';
      s += words[rng.Uniform(words.size())];
    }
    docs.push_back({std::to_string(i), U8(s), Lang::kKm, ""});
  }
  const auto a = CleanStream(docs, FilterConfig{});
  for (const auto& rej : a.rejected) EXPECT_NE(rej.fired_rule, "space_ratio");
  const auto b = CleanStream(docs, FilterConfig{});
  EXPECT_EQ(a.kept, b.kept);
}

}  // namespace
}  // namespace kmtext
