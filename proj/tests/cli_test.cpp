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
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "test_support.hpp"

namespace {

namespace fs = std::filesystem;
using kmtext::testing::ReadFile;

struct Result {
  int code = -1;
  std::string out;  // stdout and stderr combined
};

Result Cli(const std::string& args) {
  const std::string cmd = std::string(KMTEXT_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("kmtext_cli_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  std::string Path(const std::string& name) const { return (dir_ / name).string(); }
  std::string Write(const std::string& name, const std::string& content) const {
    std::ofstream(Path(name), std::ios::binary) << content;
    return Path(name);
  }
  fs::path dir_;
};

TEST_F(CliTest, HelpSucceeds) {
  const auto r = Cli("--help");
  EXPECT_EQ(r.code, 0);
  for (const char* sub : {"normalize", "filter", "segment", "train-tokenizer", "encode", "decode", "noise",
                          "eval", "stats", "pipeline"}) {
    EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
  }
}

TEST_F(CliTest, NormalizeRemovesInvisibleCharacters) {
  const auto in = Write("in.txt", "ខ្ញុំ​មាន\n");
  const auto r = Cli("normalize --format text -i " + in + " -o " + Path("out.txt"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(ReadFile(Path("out.txt")), "ខ្ញុំមាន\n");
}

TEST_F(CliTest, SegmentTrainEncodeDecodeRoundTrip) {
  const std::string text =
      "ខ្ញុំមានបំណងទៅភ្នំពេញ។ យើងរៀនភាសាខ្មែរ។\nhello world this is english\n";
  const auto in = Write("in.txt", text + text);
  ASSERT_EQ(Cli("segment --format text -i " + in + " -o " + Path("seg.txt")).code, 0);
  const auto train = Cli("train-tokenizer --format text --vocab-size 60 -i " + Path("seg.txt") + " -o " +
                         Path("vocab.tsv"));
  ASSERT_EQ(train.code, 0) << train.out;
  const std::string vocab = " --vocab " + Path("vocab.tsv");
  ASSERT_EQ(Cli("encode --format text" + vocab + " -i " + Path("seg.txt") + " -o " + Path("ids.txt")).code, 0);
  const auto dec = Cli("decode --format text" + vocab + " -i " + Path("ids.txt") + " -o " + Path("dec.txt"));
  ASSERT_EQ(dec.code, 0) << dec.out;
  EXPECT_EQ(ReadFile(Path("dec.txt")), text + text);

  ASSERT_EQ(Cli("noise --format text" + vocab + " --seed 3 -i " + Path("seg.txt") + " -o " + Path("p1.jsonl")).code,
            0);
  ASSERT_EQ(Cli("noise --format text" + vocab + " --seed 3 -i " + Path("seg.txt") + " -o " + Path("p2.jsonl")).code,
            0);
  EXPECT_FALSE(ReadFile(Path("p1.jsonl")).empty());
  EXPECT_EQ(ReadFile(Path("p1.jsonl")), ReadFile(Path("p2.jsonl")));
}

TEST_F(CliTest, EvalReportsBothViews) {
  const auto hyp = Write("hyp.txt", "ខ្ញុំ មានបំណង\n");
  const auto ref = Write("ref.txt", "ខ្ញុំ មាន បំណង\n");
  const auto r = Cli("eval --metric chrf --hyp " + hyp + " --ref " + ref + " -o " + Path("eval.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(ReadFile(Path("eval.json")));
  for (const char* key : {"metric", "s_content", "s_all", "delta_s", "p_value", "config_signature", "signature"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_NEAR(j["s_all"].get<double>(), 69.61895838794734, 1e-9);
  EXPECT_NEAR(j["s_content"].get<double>(), 100.0, 1e-9);
  EXPECT_NEAR(j["delta_s"].get<double>(), j["s_all"].get<double>() - j["s_content"].get<double>(), 1e-12);
  EXPECT_TRUE(j["p_value"].is_null());
}

TEST_F(CliTest, EvalWithBaselineGivesPValue) {
  std::string ref, good, bad;
  for (int i = 0; i < 30; ++i) {
    ref += "the cat number " + std::to_string(i) + " sat on the mat\n";
    good += "the cat number " + std::to_string(i) + " sat on the mat\n";
    bad += "a dog " + std::to_string(i * 7) + " ran\n";
  }
  const auto r = Cli("eval --metric bleu --lang en --resamples 200 --hyp " + Write("good.txt", good) +
                     " --baseline " + Write("bad.txt", bad) + " --ref " + Write("ref.txt", ref) + " -o " +
                     Path("eval.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(ReadFile(Path("eval.json")));
  ASSERT_TRUE(j["p_value"].is_number());
  EXPECT_LT(j["p_value"].get<double>(), 0.01);
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  EXPECT_EQ(Cli("eval --hyp " + Write("h.txt", "a\n")).code, 2);
  EXPECT_EQ(Cli("no-such-command").code, 2);
  EXPECT_EQ(Cli("segment --workers 0").code, 2);
  const auto cfg = Write("cfg.json", R"({"stagez": []})");
  const auto r = Cli("pipeline --config " + cfg + " -i " + Write("in.jsonl", "") + " -o " + Path("out"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("stagez"), std::string::npos) << r.out;
}

TEST_F(CliTest, IngestionErrorsExitThreeAndNameTheLine) {
  const auto in = Write("bad.jsonl", "{\"id\":\"a\",\"text\":\"ok\"}\n{\"id\":\"b\",\"text\":\n");
  const auto r = Cli("normalize -i " + in + " -o " + Path("out.jsonl"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("line 2"), std::string::npos) << r.out;

  const auto mismatch = Cli("eval --hyp " + Write("h.txt", "a\nb\n") + " --ref " + Write("r.txt", "a\n"));
  EXPECT_EQ(mismatch.code, 3) << mismatch.out;
  EXPECT_EQ(Cli("normalize -i " + Path("missing.jsonl")).code, 3);
}

TEST_F(CliTest, FilterWritesRejectionLog) {
  const auto in = Write("in.jsonl",
                        "{\"id\":\"short\",\"text\":\"ខ្ញុំ\"}\n"
                        "{\"id\":\"long\",\"text\":\"ខ្ញុំមានបំណងទៅភ្នំពេញ។ យើងរៀនភាសាខ្មែរនៅសាលា។\"}\n");
  const auto r = Cli("filter -i " + in + " -o " + Path("kept.jsonl") + " --rejects " + Path("rej.jsonl"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto kept = ReadFile(Path("kept.jsonl"));
  EXPECT_NE(kept.find("\"long\""), std::string::npos);
  EXPECT_EQ(kept.find("\"short\""), std::string::npos);
  const auto rej = nlohmann::json::parse(ReadFile(Path("rej.jsonl")));
  EXPECT_EQ(rej["id"], "short");
  EXPECT_EQ(rej["fired_rule"], "min_chars");
  EXPECT_TRUE(rej["profile"].is_object());
}

TEST_F(CliTest, PipelineWritesManifest) {
  const auto cfg = Write("cfg.json", R"({"stages": ["normalize", "repair_spaces", "filter", "segment", "stats"]})");
  const auto in = Write("in.jsonl", kmtext::testing::PipelineFixtureJsonl(40, 2));
  const auto r = Cli("pipeline --config " + cfg + " -i " + in + " -o " + Path("out"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto m = nlohmann::json::parse(ReadFile(Path("out/manifest.json")));
  ASSERT_EQ(m["stages"].size(), 5u);
  for (const auto& s : m["stages"]) {
    EXPECT_EQ(s["input"].get<uint64_t>(), s["kept"].get<uint64_t>() + s["rejected"].get<uint64_t>());
  }
  EXPECT_TRUE(fs::exists(Path("out/stats.json")));
}

}  // namespace
