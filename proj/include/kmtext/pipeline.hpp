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

// Pipeline configuration, corpus statistics and the end-to-end runner.
//
// The runner makes two streaming passes. Pass one reads the input in
// batches and applies the per-document stages (normalize, repair_spaces,
// filter, segment), writing documents.jsonl, rejected.jsonl and
// segmented.jsonl. The tokenizer is then trained on the accumulated unit
// counts. Pass two re-reads the segmented corpus for encode, noise, eval
// and stats. Batches are transformed in parallel and written in input
// order, so every output is independent of the worker count.

#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "kmtext/curate.hpp"
#include "kmtext/error.hpp"
#include "kmtext/io.hpp"
#include "kmtext/metrics/char_lm.hpp"
#include "kmtext/metrics/tokenizer_stats.hpp"
#include "kmtext/noise.hpp"
#include "kmtext/normalize.hpp"
#include "kmtext/parallel.hpp"
#include "kmtext/random.hpp"
#include "kmtext/segment.hpp"
#include "kmtext/subword.hpp"

namespace kmtext {

inline constexpr std::string_view kToolVersion = "kmtext 0.1.0";

// Canonical stage order; a configured stage list must be a subsequence.
inline constexpr std::array<std::string_view, 9> kStageOrder = {
    "normalize", "repair_spaces", "filter", "segment", "train_tokenizer",
    "encode",    "noise",         "eval",   "stats"};

struct PipelineConfig {
  std::vector<std::string> stages = {"normalize", "repair_spaces", "filter",
                                     "segment",   "train_tokenizer", "noise", "stats"};
  uint64_t seed = 0;
  Lang default_lang = Lang::kKm;
  std::string rules_path;      // empty: built-in rule table
  std::string invisible_path;  // empty: built-in invisible set
  std::string lexicon_path;
  std::string vocab_path;  // used when train_tokenizer is not a stage
  FilterConfig filter;
  TrainerConfig tokenizer;
  NoiseConfig noise;
  int lm_order = 5;
  // Execution-only settings; excluded from the signature.
  size_t workers = 1;
  size_t batch_size = 256;

  bool Has(std::string_view stage) const {
    return std::find(stages.begin(), stages.end(), stage) != stages.end();
  }

  void Validate() const {
    size_t pos = 0;
    for (const auto& s : stages) {
      auto it = std::find(kStageOrder.begin(), kStageOrder.end(), s);
      if (it == kStageOrder.end()) throw ConfigError("unknown stage '" + s + "'");
      const auto idx = static_cast<size_t>(it - kStageOrder.begin());
      if (idx < pos) throw ConfigError("stage '" + s + "' is out of order");
      pos = idx + 1;
    }
    const bool needs_tokens = Has("train_tokenizer") || Has("encode") || Has("noise");
    if (needs_tokens && !Has("segment")) {
      throw ConfigError("tokenizer stages need the segment stage");
    }
    if ((Has("encode") || Has("noise")) && !Has("train_tokenizer") && vocab_path.empty()) {
      throw ConfigError("encode/noise need train_tokenizer or tokenizer.vocab");
    }
    if ((Has("segment") || Has("stats") || Has("eval")) && lexicon_path.empty()) {
      throw ConfigError("segment.lexicon is required");
    }
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (lm_order < 1) throw ConfigError("eval.lm_order must be >= 1");
    filter.Validate();
    noise.Validate();
  }

  nlohmann::json ToJson(bool with_execution = true) const {
    nlohmann::json j;
    j["stages"] = stages;
    j["seed"] = seed;
    j["default_lang"] = LangCode(default_lang);
    j["normalize"] = {{"rules", rules_path}, {"invisible", invisible_path}};
    j["filter"] = {{"min_chars", filter.min_chars},
                   {"max_repeat", filter.max_repeat},
                   {"repeat_mode", filter.repeat_mode == RepeatMode::kConsecutiveRun ? "run" : "total"},
                   {"max_space_ratio", filter.max_space_ratio},
                   {"max_number_ratio", filter.max_number_ratio},
                   {"max_emoji_ratio", filter.max_emoji_ratio},
                   {"max_punct_ratio", filter.max_punct_ratio},
                   {"max_unmatched_script_ratio", filter.max_unmatched_script_ratio},
                   {"min_lang_prob", filter.min_lang_prob},
                   {"delimiter_space_ratio", filter.delimiter_space_ratio}};
    j["segment"] = {{"lexicon", lexicon_path}};
    j["tokenizer"] = {{"mode", ModeName(tokenizer.mode)},
                      {"vocab", vocab_path},
                      {"target_size", tokenizer.target_size},
                      {"max_piece_len", tokenizer.max_piece_len},
                      {"seed_size", tokenizer.seed_size},
                      {"min_char_count", tokenizer.min_char_count},
                      {"shrink_factor", tokenizer.shrink_factor},
                      {"initial_em_iterations", tokenizer.initial_em_iterations},
                      {"em_iterations_per_round", tokenizer.em_iterations_per_round},
                      {"final_em_iterations", tokenizer.final_em_iterations}};
    j["noise"] = {{"mask_ratio", noise.mask_ratio},
                  {"poisson_lambda", noise.poisson_lambda},
                  {"max_seq_len", noise.max_seq_len},
                  {"scope", noise.scope == MaskScope::kSentence ? "sentence" : "chunk"}};
    j["eval"] = {{"lm_order", lm_order}};
    if (with_execution) j["execution"] = {{"workers", workers}, {"batch_size", batch_size}};
    return j;
  }

  static PipelineConfig FromJson(const nlohmann::json& j) {
    PipelineConfig c;
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    try {
      for (const auto& [key, _] : j.items()) {
        static const std::array<std::string_view, 10> kKeys = {
            "stages", "seed", "default_lang", "normalize", "filter",
            "segment", "tokenizer", "noise", "eval", "execution"};
        if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
          throw ConfigError("unknown config key '" + key + "'");
        }
      }
      if (j.contains("stages")) c.stages = j["stages"].get<std::vector<std::string>>();
      c.seed = j.value("seed", c.seed);
      c.default_lang = ParseLang(j.value("default_lang", std::string("km")));
      if (j.contains("normalize")) {
        const auto& n = j["normalize"];
        c.rules_path = n.value("rules", "");
        c.invisible_path = n.value("invisible", "");
      }
      if (j.contains("filter")) {
        const auto& f = j["filter"];
        auto& fc = c.filter;
        fc.min_chars = f.value("min_chars", fc.min_chars);
        fc.max_repeat = f.value("max_repeat", fc.max_repeat);
        const std::string mode = f.value("repeat_mode", std::string("run"));
        if (mode != "run" && mode != "total") throw ConfigError("filter.repeat_mode must be run|total");
        fc.repeat_mode = mode == "run" ? RepeatMode::kConsecutiveRun : RepeatMode::kTotalOccurrences;
        fc.max_space_ratio = f.value("max_space_ratio", fc.max_space_ratio);
        fc.max_number_ratio = f.value("max_number_ratio", fc.max_number_ratio);
        fc.max_emoji_ratio = f.value("max_emoji_ratio", fc.max_emoji_ratio);
        fc.max_punct_ratio = f.value("max_punct_ratio", fc.max_punct_ratio);
        fc.max_unmatched_script_ratio =
            f.value("max_unmatched_script_ratio", fc.max_unmatched_script_ratio);
        fc.min_lang_prob = f.value("min_lang_prob", fc.min_lang_prob);
        fc.delimiter_space_ratio = f.value("delimiter_space_ratio", fc.delimiter_space_ratio);
      }
      if (j.contains("segment")) c.lexicon_path = j["segment"].value("lexicon", "");
      if (j.contains("tokenizer")) {
        const auto& t = j["tokenizer"];
        auto& tc = c.tokenizer;
        tc.mode = ParseMode(t.value("mode", std::string(ModeName(tc.mode))));
        c.vocab_path = t.value("vocab", "");
        tc.target_size = t.value("target_size", tc.target_size);
        tc.max_piece_len = t.value("max_piece_len", tc.max_piece_len);
        tc.seed_size = t.value("seed_size", tc.seed_size);
        tc.min_char_count = t.value("min_char_count", tc.min_char_count);
        tc.shrink_factor = t.value("shrink_factor", tc.shrink_factor);
        tc.initial_em_iterations = t.value("initial_em_iterations", tc.initial_em_iterations);
        tc.em_iterations_per_round = t.value("em_iterations_per_round", tc.em_iterations_per_round);
        tc.final_em_iterations = t.value("final_em_iterations", tc.final_em_iterations);
      }
      if (j.contains("noise")) {
        const auto& n = j["noise"];
        c.noise.mask_ratio = n.value("mask_ratio", c.noise.mask_ratio);
        c.noise.poisson_lambda = n.value("poisson_lambda", c.noise.poisson_lambda);
        c.noise.max_seq_len = n.value("max_seq_len", c.noise.max_seq_len);
        const std::string scope = n.value("scope", std::string("sentence"));
        if (scope != "sentence" && scope != "chunk") throw ConfigError("noise.scope must be sentence|chunk");
        c.noise.scope = scope == "sentence" ? MaskScope::kSentence : MaskScope::kChunk;
      }
      if (j.contains("eval")) c.lm_order = j["eval"].value("lm_order", c.lm_order);
      if (j.contains("execution")) {
        c.workers = j["execution"].value("workers", c.workers);
        c.batch_size = j["execution"].value("batch_size", c.batch_size);
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("bad config value: ") + e.what());
    }
    c.noise.rng_seed = c.seed;
    return c;
  }

  static PipelineConfig Load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    return FromJson(j);
  }

  // FNV-1a of the canonical JSON, execution settings excluded.
  std::string Signature() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(Fnv1a64(ToJson(false).dump())));
    return buf;
  }
};

struct PipelineResources {
  Normalizer normalizer;
  Lexicon lexicon;
  std::optional<SubwordVocab> vocab;

  static PipelineResources Load(const PipelineConfig& cfg) {
    PipelineResources r;
    auto open = [](const std::string& path) {
      std::ifstream in(path, std::ios::binary);
      if (!in) throw ConfigError("cannot open " + path);
      return in;
    };
    if (!cfg.rules_path.empty()) {
      auto in = open(cfg.rules_path);
      r.normalizer.table = RuleTable::Parse(in);
    }
    if (!cfg.invisible_path.empty()) {
      auto in = open(cfg.invisible_path);
      r.normalizer.invisible = InvisibleSet::Parse(in);
    }
    if (!cfg.lexicon_path.empty()) {
      auto in = open(cfg.lexicon_path);
      r.lexicon = Lexicon::Parse(in);
    }
    if (!cfg.vocab_path.empty() && !cfg.Has("train_tokenizer")) {
      auto in = open(cfg.vocab_path);
      r.vocab = SubwordVocab::Parse(in);
    }
    return r;
  }
};

// Streaming corpus statistics.
class StatsAccumulator {
 public:
  void Add(Lang lang, const std::vector<Token>& tokens, const std::vector<int>* ids = nullptr) {
    PerLang& p = per_lang_[lang == Lang::kKm ? 0 : 1];
    ++p.documents;
    size_t chars = 0, spaces = 0;
    for (const auto& t : tokens) {
      if (t.IsSpace()) {
        ++p.functional_spaces;
      } else {
        ++p.word_tokens;
      }
      for (char32_t c : DecodeUtf8(t.surface)) {
        ++chars;
        spaces += c == kSpace;
        ++char_classes_[static_cast<size_t>(Classify(c))];
      }
    }
    p.characters += chars;
    if (ids) {
      has_pieces_ = true;
      p.subword_pieces += ids->size();
    }
    const double ratio = chars == 0 ? 0.0 : static_cast<double>(spaces) / static_cast<double>(chars);
    ++space_hist_[std::min<size_t>(kBuckets - 1, static_cast<size_t>(ratio * kBuckets))];
  }

  nlohmann::json Report() const {
    static constexpr std::array<std::string_view, 9> kClassNames = {
        "space", "digit", "emoji", "punct", "khmer", "latin", "other_letter", "inherited", "other"};
    nlohmann::json j;
    for (int l = 0; l < 2; ++l) {
      const PerLang& p = per_lang_[l];
      nlohmann::json e = {{"documents", p.documents},
                          {"characters", p.characters},
                          {"word_tokens", p.word_tokens},
                          {"functional_spaces", p.functional_spaces}};
      if (has_pieces_) e["subword_pieces"] = p.subword_pieces;
      j["languages"][l == 0 ? "km" : "en"] = e;
    }
    nlohmann::json classes;
    for (size_t i = 0; i < kClassNames.size(); ++i) classes[std::string(kClassNames[i])] = char_classes_[i];
    j["char_classes"] = classes;
    j["space_ratio_histogram"] = {{"bucket_width", 1.0 / kBuckets}, {"counts", space_hist_}};
    const auto km = per_lang_[0].word_tokens, en = per_lang_[1].word_tokens;
    j["km_en_token_ratio"] = en == 0 ? nlohmann::json(nullptr)
                                     : nlohmann::json(static_cast<double>(km) / static_cast<double>(en));
    return j;
  }

 private:
  static constexpr size_t kBuckets = 20;
  struct PerLang {
    uint64_t documents = 0, characters = 0, word_tokens = 0, functional_spaces = 0, subword_pieces = 0;
  };
  std::array<PerLang, 2> per_lang_{};
  std::array<uint64_t, 9> char_classes_{};
  std::vector<uint64_t> space_hist_ = std::vector<uint64_t>(kBuckets, 0);
  bool has_pieces_ = false;
};

struct StageCounts {
  std::string name;
  uint64_t input = 0;
  uint64_t kept = 0;
  uint64_t rejected = 0;
  std::map<std::string, uint64_t> extra;

  bool Reconciles() const { return input == kept + rejected; }
};

struct Manifest {
  std::string tool_version = std::string(kToolVersion);
  std::string config_signature;
  std::vector<StageCounts> stages;
  double wall_seconds = 0.0;

  StageCounts& Stage(const std::string& name) {
    for (auto& s : stages) {
      if (s.name == name) return s;
    }
    stages.emplace_back();
    stages.back().name = name;
    return stages.back();
  }

  nlohmann::json ToJson() const {
    nlohmann::json st = nlohmann::json::array();
    for (const auto& s : stages) {
      nlohmann::json e = {{"stage", s.name}, {"input", s.input}, {"kept", s.kept}, {"rejected", s.rejected}};
      for (const auto& [k, v] : s.extra) e[k] = v;
      st.push_back(e);
    }
    return {{"tool_version", tool_version},
            {"config_signature", config_signature},
            {"stages", st},
            {"wall_seconds", wall_seconds}};
  }
};

namespace internal {

struct DocOutcome {
  Document doc;
  bool kept = true;
  bool stripped = false;
  FilterVerdict verdict;
  std::vector<Token> tokens;
};

inline DocOutcome ProcessDocument(const Document& in, const PipelineConfig& cfg,
                                  const PipelineResources& res) {
  DocOutcome o;
  o.doc = in;
  std::u32string text = DecodeUtf8(in.text);
  if (cfg.Has("normalize")) text = res.normalizer(text);
  if (cfg.Has("repair_spaces") && in.lang == Lang::kKm && DetectDelimiterSpaces(text, cfg.filter)) {
    text = StripDelimiterSpaces(text);
    o.stripped = true;
  }
  if (cfg.Has("filter")) {
    o.verdict = VerdictFromProfile(ProfileChars(text), in.lang,
                                   ScriptRatioProbability(text, in.lang), cfg.filter);
    o.kept = o.verdict.kept;
  }
  o.doc.text = EncodeUtf8(text);
  if (o.kept && cfg.Has("segment")) o.tokens = SegmentWords(text, res.lexicon);
  return o;
}

inline std::ofstream OpenOut(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + p.string());
  return out;
}

}  // namespace internal

// Runs the configured stages over `input` and writes results into
// `out_dir`. Deterministic outputs: documents.jsonl, rejected.jsonl,
// segmented.jsonl, vocab.tsv, encoded.jsonl, pairs.jsonl, eval.json,
// stats.json. manifest.json also records wall time.
inline Manifest RunPipeline(const PipelineConfig& cfg, const std::string& input,
                            InputFormat format, const std::filesystem::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  cfg.Validate();
  PipelineResources res = PipelineResources::Load(cfg);
  std::filesystem::create_directories(out_dir);
  Manifest m;
  m.config_signature = cfg.Signature();
  for (const auto& s : cfg.stages) m.Stage(s);

  // Pass one: per-document stages.
  {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw IngestionError("cannot open input " + input, 0);
    DocumentReader reader(in, format, cfg.default_lang);
    auto docs_out = internal::OpenOut(out_dir / "documents.jsonl");
    auto rej_out = internal::OpenOut(out_dir / "rejected.jsonl");
    std::ofstream seg_out;
    if (cfg.Has("segment")) seg_out = internal::OpenOut(out_dir / "segmented.jsonl");
    UnitCorpus units;
    for (;;) {
      const std::vector<Document> batch = reader.NextBatch(cfg.batch_size);
      if (batch.empty()) break;
      const auto outcomes = ParallelMap(batch, cfg.workers, [&](const Document& d) {
        return internal::ProcessDocument(d, cfg, res);
      });
      for (const auto& o : outcomes) {
        bool alive = true;
        for (const auto& s : {"normalize", "repair_spaces", "filter", "segment"}) {
          if (!cfg.Has(s) || !alive) continue;
          StageCounts& sc = m.Stage(s);
          ++sc.input;
          if (std::string_view(s) == "filter" && !o.kept) {
            ++sc.rejected;
            ++sc.extra["rule:" + *o.verdict.fired_rule];
            alive = false;
          } else {
            ++sc.kept;
          }
          if (std::string_view(s) == "repair_spaces" && o.stripped) ++sc.extra["stripped"];
        }
        if (!o.kept) {
          rej_out << RejectionJson(o.doc.id, o.verdict).dump() << '\n';
          continue;
        }
        docs_out << DocumentJson(o.doc).dump() << '\n';
        if (cfg.Has("segment")) {
          seg_out << SegmentedJson(o.doc.id, o.doc.lang, o.tokens).dump() << '\n';
          if (cfg.Has("train_tokenizer")) units.AddTokens(o.tokens, cfg.tokenizer.mode);
        }
      }
    }
    if (cfg.Has("train_tokenizer")) {
      StageCounts& sc = m.Stage("train_tokenizer");
      sc.input = sc.kept = cfg.Has("segment") ? m.Stage("segment").kept : 0;
      TrainerConfig tc = cfg.tokenizer;
      tc.workers = cfg.workers;
      TrainReport report;
      res.vocab = TrainUnigram(units, tc, &report);
      sc.extra["units"] = units.size();
      sc.extra["vocab_pieces"] = res.vocab->pieces().size();
      sc.extra["prune_rounds"] = report.rounds;
      auto vout = internal::OpenOut(out_dir / "vocab.tsv");
      vout << res.vocab->Serialize();
    }
  }

  // Pass two: corpus-level consumers of the segmented stream.
  const bool pass_two = cfg.Has("encode") || cfg.Has("noise") || cfg.Has("eval") || cfg.Has("stats");
  if (pass_two) {
    const bool from_segmented = cfg.Has("segment");
    std::ifstream in(out_dir / (from_segmented ? "segmented.jsonl" : "documents.jsonl"), std::ios::binary);
    std::ofstream enc_out, pairs_out;
    if (cfg.Has("encode")) enc_out = internal::OpenOut(out_dir / "encoded.jsonl");
    if (cfg.Has("noise")) pairs_out = internal::OpenOut(out_dir / "pairs.jsonl");
    StatsAccumulator stats;
    NoiseStats noise_stats;
    std::vector<std::string> lm_train, lm_heldout;
    std::vector<metrics::LengthCounts> heldout_lengths;
    std::vector<std::vector<int>> heldout_phrases;
    NoiseConfig ncfg = cfg.noise;
    ncfg.rng_seed = cfg.seed;
    const SubwordVocab* vocab = res.vocab ? &*res.vocab : nullptr;

    struct Item {
      SegmentedDocument doc;
      std::vector<int> ids;
      std::vector<TrainingPair> pairs;
      NoiseStats ns;
    };
    std::string line;
    size_t lineno = 0, doc_index = 0;
    for (;;) {
      std::vector<std::pair<size_t, std::string>> raw;
      while (raw.size() < cfg.batch_size && std::getline(in, line)) raw.emplace_back(++lineno, line);
      if (raw.empty()) break;
      const auto items = ParallelMap(raw, cfg.workers, [&](const std::pair<size_t, std::string>& r) {
        Item it;
        if (from_segmented) {
          it.doc = ParseSegmentedJson(r.second, r.first);
        } else {
          const Document d = ParseDocumentJson(r.second, r.first, cfg.default_lang);
          it.doc = {d.id, d.lang, SegmentWords(d.text, res.lexicon)};
        }
        if (vocab && (cfg.Has("encode") || cfg.Has("stats") || cfg.Has("eval"))) {
          it.ids = vocab->Encode(it.doc.tokens);
        }
        if (cfg.Has("noise")) it.pairs = MakePairs(it.doc.id, it.doc.lang, it.doc.tokens, *vocab, ncfg, &it.ns);
        return it;
      });
      for (const auto& it : items) {
        const size_t idx = doc_index++;
        if (cfg.Has("encode")) {
          StageCounts& sc = m.Stage("encode");
          ++sc.input;
          ++sc.kept;
          sc.extra["pieces"] += it.ids.size();
          enc_out << nlohmann::json({{"id", it.doc.id}, {"ids", it.ids}}).dump() << '\n';
        }
        if (cfg.Has("noise")) {
          StageCounts& sc = m.Stage("noise");
          ++sc.input;
          if (it.pairs.empty()) ++sc.rejected;
          else ++sc.kept;
          sc.extra["pairs"] += it.pairs.size();
          sc.extra["hard_splits"] += it.ns.hard_splits;
          noise_stats.words += it.ns.words;
          noise_stats.masked_words += it.ns.masked_words;
          for (const auto& p : it.pairs) pairs_out << PairJson(p).dump() << '\n';
        }
        if (cfg.Has("stats")) {
          StageCounts& sc = m.Stage("stats");
          ++sc.input;
          ++sc.kept;
          stats.Add(it.doc.lang, it.doc.tokens, vocab ? &it.ids : nullptr);
        }
        if (cfg.Has("eval")) {
          StageCounts& sc = m.Stage("eval");
          ++sc.input;
          ++sc.kept;
          const std::string text = Detokenize(it.doc.tokens);
          if (idx % 10 == 9) {
            lm_heldout.push_back(text);
            if (vocab) {
              heldout_lengths.push_back(metrics::CountLengths(text, it.ids, *vocab));
              for (const auto& ph : metrics::Phrases(it.doc.tokens)) heldout_phrases.push_back(vocab->Encode(ph));
            }
          } else {
            lm_train.push_back(text);
          }
        }
      }
    }
    if (cfg.Has("noise")) {
      m.Stage("noise").extra["words"] = noise_stats.words;
      m.Stage("noise").extra["masked_words"] = noise_stats.masked_words;
    }
    if (cfg.Has("stats")) {
      nlohmann::json report = stats.Report();
      report["config_signature"] = m.config_signature;
      internal::OpenOut(out_dir / "stats.json") << report.dump(2) << '\n';
    }
    if (cfg.Has("eval")) {
      nlohmann::json report = {{"config_signature", m.config_signature},
                               {"heldout_documents", lm_heldout.size()}};
      if (!lm_train.empty() && !lm_heldout.empty()) {
        const auto lm = metrics::CharLm::Train(lm_train, {cfg.lm_order});
        report["char_lm"] = {{"order", cfg.lm_order},
                             {"smoothing", lm.smoothing() == metrics::Smoothing::kKneserNey ? "kneser-ney" : "add-k"},
                             {"heldout_perplexity", lm.Perplexity(lm_heldout)}};
      }
      if (vocab && !heldout_phrases.empty()) {
        report["tokenizer"] = {{"fertility", metrics::Fertility(heldout_phrases)},
                               {"length_ratio", metrics::LengthRatio(heldout_lengths)}};
      }
      internal::OpenOut(out_dir / "eval.json") << report.dump(2) << '\n';
    }
  }

  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  internal::OpenOut(out_dir / "manifest.json") << m.ToJson().dump(2) << '\n';
  return m;
}

}  // namespace kmtext
