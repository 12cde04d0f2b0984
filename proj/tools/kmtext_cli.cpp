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

// kmtext command-line front end.
//
// Exit codes: 0 ok, 2 configuration error, 3 ingestion error, 4 internal
// invariant violation.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "kmtext/kmtext.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIngestion = 3;
constexpr int kExitInvariant = 4;

struct CommonOptions {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<size_t> workers;
  std::string input = "-";
  std::string output = "-";
  std::string format = "jsonl";
  std::string lang = "km";
  std::string lexicon;
  std::string vocab;
};

struct Context {
  kmtext::PipelineConfig cfg;
  kmtext::InputFormat format = kmtext::InputFormat::kJsonl;
  kmtext::Lang lang = kmtext::Lang::kKm;
};

Context MakeContext(const CommonOptions& o) {
  Context c;
  if (!o.config_path.empty()) c.cfg = kmtext::PipelineConfig::Load(o.config_path);
  if (o.seed) c.cfg.seed = *o.seed;
  if (o.workers) c.cfg.workers = *o.workers;
  c.cfg.noise.rng_seed = c.cfg.seed;
  if (!o.lexicon.empty()) c.cfg.lexicon_path = o.lexicon;
  if (c.cfg.lexicon_path.empty()) c.cfg.lexicon_path = KMTEXT_DATA_DIR "/khmer_lexicon.tsv";
  if (!o.vocab.empty()) c.cfg.vocab_path = o.vocab;
  c.format = kmtext::ParseFormat(o.format);
  c.lang = kmtext::ParseLang(o.lang);
  return c;
}

// Owns a file stream or borrows stdin/stdout for "-".
class Input {
 public:
  explicit Input(const std::string& path) {
    if (path == "-" || path.empty()) return;
    file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!*file_) throw kmtext::IngestionError("cannot open " + path, 0);
  }
  std::istream& get() { return file_ ? *file_ : std::cin; }

 private:
  std::unique_ptr<std::ifstream> file_;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path == "-" || path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
    if (!*file_) throw kmtext::ConfigError("cannot write " + path);
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

kmtext::Lexicon LoadLexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw kmtext::ConfigError("cannot open lexicon " + path);
  return kmtext::Lexicon::Parse(in);
}

kmtext::SubwordVocab LoadVocab(const std::string& path) {
  if (path.empty()) throw kmtext::ConfigError("--vocab is required");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw kmtext::ConfigError("cannot open vocab " + path);
  return kmtext::SubwordVocab::Parse(in);
}

// Segmented input: U+241F-separated text lines or segmented JSON records.
template <typename Fn>
void ForEachSegmented(std::istream& in, kmtext::InputFormat format, kmtext::Lang lang, Fn&& fn) {
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (format == kmtext::InputFormat::kText) {
      fn(kmtext::SegmentedDocument{"line-" + std::to_string(lineno), lang,
                                   kmtext::ParsePresegmented(line)});
    } else if (line.find_first_not_of(" \t") != std::string::npos) {
      fn(kmtext::ParseSegmentedJson(line, lineno));
    }
  }
}

// Batches documents through a pure transform, writing in input order.
template <typename Fn, typename Write>
void StreamDocuments(std::istream& in, const Context& c, Fn&& fn, Write&& write) {
  kmtext::DocumentReader reader(in, c.format, c.lang);
  for (;;) {
    auto batch = reader.NextBatch(c.cfg.batch_size);
    if (batch.empty()) break;
    for (auto& r : kmtext::ParallelMap(batch, c.cfg.workers, fn)) write(r);
  }
}

int RunNormalize(const CommonOptions& o) {
  Context c = MakeContext(o);
  c.cfg.lexicon_path.clear();
  const auto res = kmtext::PipelineResources::Load(c.cfg);
  Input in(o.input);
  Output out(o.output);
  StreamDocuments(
      in.get(), c,
      [&](const kmtext::Document& d) {
        kmtext::Document r = d;
        r.text = res.normalizer(std::string_view(d.text));
        return r;
      },
      [&](const kmtext::Document& d) { kmtext::WriteDocument(d, c.format, out.get()); });
  return kExitOk;
}

int RunFilter(const CommonOptions& o, const std::string& rejects_path) {
  Context c = MakeContext(o);
  c.cfg.lexicon_path.clear();
  c.cfg.filter.Validate();
  const auto res = kmtext::PipelineResources::Load(c.cfg);
  Input in(o.input);
  Output out(o.output);
  std::unique_ptr<Output> rejects;
  if (!rejects_path.empty()) rejects = std::make_unique<Output>(rejects_path);
  size_t kept = 0, rejected = 0;
  StreamDocuments(
      in.get(), c,
      [&](const kmtext::Document& d) { return kmtext::CleanDocument(d, c.cfg.filter, res.normalizer); },
      [&](const kmtext::CleanResult& r) {
        if (r.verdict.kept) {
          ++kept;
          kmtext::WriteDocument(r.doc, c.format, out.get());
        } else {
          ++rejected;
          if (rejects) rejects->get() << kmtext::RejectionJson(r.doc.id, r.verdict).dump() << '\n';
        }
      });
  std::cerr << "kept " << kept << ", rejected " << rejected << '\n';
  return kExitOk;
}

int RunSegment(const CommonOptions& o) {
  Context c = MakeContext(o);
  const kmtext::Lexicon lex = LoadLexicon(c.cfg.lexicon_path);
  Input in(o.input);
  Output out(o.output);
  StreamDocuments(
      in.get(), c,
      [&](const kmtext::Document& d) {
        return std::make_pair(d, kmtext::SegmentWords(d.text, lex));
      },
      [&](const std::pair<kmtext::Document, std::vector<kmtext::Token>>& r) {
        if (c.format == kmtext::InputFormat::kText) {
          out.get() << kmtext::JoinPresegmented(r.second) << '\n';
        } else {
          out.get() << kmtext::SegmentedJson(r.first.id, r.first.lang, r.second).dump() << '\n';
        }
      });
  return kExitOk;
}

int RunTrainTokenizer(const CommonOptions& o, const std::string& mode,
                      std::optional<size_t> vocab_size) {
  Context c = MakeContext(o);
  kmtext::TrainerConfig tc = c.cfg.tokenizer;
  if (!mode.empty()) tc.mode = kmtext::ParseMode(mode);
  if (vocab_size) tc.target_size = *vocab_size;
  tc.workers = c.cfg.workers;
  kmtext::UnitCorpus corpus;
  Input in(o.input);
  ForEachSegmented(in.get(), c.format, c.lang,
                   [&](const kmtext::SegmentedDocument& d) { corpus.AddTokens(d.tokens, tc.mode); });
  kmtext::TrainReport report;
  const auto vocab = kmtext::TrainUnigram(corpus, tc, &report);
  Output out(o.output);
  out.get() << vocab.Serialize();
  std::cerr << "units " << corpus.size() << ", charset " << report.charset_size << ", pieces "
            << vocab.pieces().size() << ", prune rounds " << report.rounds << '\n';
  return kExitOk;
}

int RunEncode(const CommonOptions& o) {
  Context c = MakeContext(o);
  const auto vocab = LoadVocab(c.cfg.vocab_path);
  Input in(o.input);
  Output out(o.output);
  ForEachSegmented(in.get(), c.format, c.lang, [&](const kmtext::SegmentedDocument& d) {
    const auto ids = vocab.Encode(d.tokens);
    if (c.format == kmtext::InputFormat::kText) {
      for (size_t i = 0; i < ids.size(); ++i) out.get() << (i ? " " : "") << ids[i];
      out.get() << '\n';
    } else {
      out.get() << json({{"id", d.id}, {"ids", ids}}).dump() << '\n';
    }
  });
  return kExitOk;
}

int RunDecode(const CommonOptions& o) {
  Context c = MakeContext(o);
  const auto vocab = LoadVocab(c.cfg.vocab_path);
  Input in(o.input);
  Output out(o.output);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in.get(), line)) {
    ++lineno;
    std::vector<int> ids;
    if (c.format == kmtext::InputFormat::kText) {
      std::istringstream ss(line);
      std::string tok;
      while (ss >> tok) {
        try {
          size_t used = 0;
          ids.push_back(std::stoi(tok, &used));
          if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
          throw kmtext::IngestionError("bad id '" + tok + "'", lineno);
        }
      }
    } else {
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      try {
        ids = json::parse(line).at("ids").get<std::vector<int>>();
      } catch (const json::exception& e) {
        throw kmtext::IngestionError(std::string("bad record: ") + e.what(), lineno);
      }
    }
    try {
      out.get() << vocab.Decode(ids) << '\n';
    } catch (const kmtext::InvalidId& e) {
      throw kmtext::IngestionError(e.what(), lineno);
    }
  }
  return kExitOk;
}

int RunNoise(const CommonOptions& o, bool binary) {
  Context c = MakeContext(o);
  const auto vocab = LoadVocab(c.cfg.vocab_path);
  Input in(o.input);
  Output out(o.output);
  if (binary) kmtext::WritePairHeader(out.get());
  kmtext::NoiseStats stats;
  ForEachSegmented(in.get(), c.format, c.lang, [&](const kmtext::SegmentedDocument& d) {
    for (const auto& p : kmtext::MakePairs(d.id, d.lang, d.tokens, vocab, c.cfg.noise, &stats)) {
      if (binary) {
        kmtext::WritePairRecord(p, out.get());
      } else {
        out.get() << kmtext::PairJson(p).dump() << '\n';
      }
    }
  });
  std::cerr << "chunks " << stats.chunks << ", masked " << stats.masked_words << "/" << stats.words
            << " words, hard splits " << stats.hard_splits << '\n';
  return kExitOk;
}

std::vector<std::string> ReadLines(const std::string& path) {
  Input in(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in.get(), line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

int RunEval(const CommonOptions& o, const std::string& hyp_path, const std::string& ref_path,
            const std::string& baseline_path, const std::string& metric_name, int resamples) {
  Context c = MakeContext(o);
  kmtext::metrics::CorpusMetric metric;
  if (metric_name == "bleu") metric = kmtext::metrics::BleuMetric();
  else if (metric_name == "chrf") metric = kmtext::metrics::ChrfMetric();
  else if (metric_name == "rougeL") metric = kmtext::metrics::RougeLMetric();
  else throw kmtext::ConfigError("unknown metric '" + metric_name + "'");
  const kmtext::Lexicon lex = LoadLexicon(c.cfg.lexicon_path);
  const auto res = kmtext::PipelineResources::Load([&] {
    auto cfg = c.cfg;
    cfg.lexicon_path.clear();
    cfg.vocab_path.clear();
    return cfg;
  }());
  const auto hyps = ReadLines(hyp_path);
  const auto refs = ReadLines(ref_path);
  auto report = kmtext::metrics::DeltaS(hyps, refs, metric, lex, res.normalizer);
  if (!baseline_path.empty()) {
    const auto base = ReadLines(baseline_path);
    const auto h = kmtext::metrics::PrepareForEval(hyps, lex, res.normalizer);
    const auto b = kmtext::metrics::PrepareForEval(base, lex, res.normalizer);
    const auto r = kmtext::metrics::PrepareForEval(refs, lex, res.normalizer);
    report.p_value =
        kmtext::metrics::PairedBootstrap(h.content, b.content, r.content, metric, resamples, c.cfg.seed).p_value;
  }
  Output out(o.output);
  json j = {{"metric", report.metric_name},
            {"s_content", report.s_content},
            {"s_all", report.s_all},
            {"delta_s", report.delta_s},
            {"p_value", report.p_value ? json(*report.p_value) : json(nullptr)},
            {"config_signature", c.cfg.Signature()}};
  if (metric_name == "bleu") j["signature"] = kmtext::metrics::kBleuSignature;
  if (metric_name == "chrf") j["signature"] = kmtext::metrics::kChrfSignature;
  out.get() << j.dump(2) << '\n';
  return kExitOk;
}

int RunStats(const CommonOptions& o) {
  Context c = MakeContext(o);
  const kmtext::Lexicon lex = LoadLexicon(c.cfg.lexicon_path);
  std::optional<kmtext::SubwordVocab> vocab;
  if (!o.vocab.empty() || !c.cfg.vocab_path.empty()) vocab = LoadVocab(c.cfg.vocab_path);
  kmtext::StatsAccumulator acc;
  Input in(o.input);
  StreamDocuments(
      in.get(), c,
      [&](const kmtext::Document& d) {
        auto tokens = kmtext::SegmentWords(d.text, lex);
        std::vector<int> ids;
        if (vocab) ids = vocab->Encode(tokens);
        return std::make_tuple(d.lang, std::move(tokens), std::move(ids));
      },
      [&](const std::tuple<kmtext::Lang, std::vector<kmtext::Token>, std::vector<int>>& r) {
        acc.Add(std::get<0>(r), std::get<1>(r), vocab ? &std::get<2>(r) : nullptr);
      });
  json report = acc.Report();
  report["config_signature"] = c.cfg.Signature();
  Output out(o.output);
  out.get() << report.dump(2) << '\n';
  return kExitOk;
}

int RunPipelineCommand(const CommonOptions& o) {
  if (o.output == "-" || o.output.empty()) throw kmtext::ConfigError("pipeline needs --output DIR");
  if (o.input == "-" || o.input.empty()) throw kmtext::ConfigError("pipeline needs --input FILE");
  Context c = MakeContext(o);
  const auto m = kmtext::RunPipeline(c.cfg, o.input, c.format, o.output);
  for (const auto& s : m.stages) {
    std::cerr << s.name << ": input " << s.input << ", kept " << s.kept << ", rejected " << s.rejected
              << '\n';
  }
  return kExitOk;
}

void AddCommon(CLI::App* app, CommonOptions* o) {
  app->add_option("--config", o->config_path, "JSON configuration file");
  app->add_option("--seed", o->seed, "Random seed");
  app->add_option("--workers", o->workers, "Worker threads")->check(CLI::PositiveNumber);
  app->add_option("--input,-i", o->input, "Input path, - for stdin");
  app->add_option("--output,-o", o->output, "Output path, - for stdout");
  app->add_option("--format", o->format, "Record format")->check(CLI::IsMember({"text", "jsonl"}));
  app->add_option("--lang", o->lang, "Language of plain-text input")->check(CLI::IsMember({"km", "en"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kmtext: Khmer text preprocessing, tokenization and evaluation"};
  app.require_subcommand(1);
  CommonOptions o;
  std::string rejects, mode, hyp, ref, baseline, metric = "chrf";
  std::optional<size_t> vocab_size;
  bool binary = false;
  int resamples = 1000;

  auto* normalize = app.add_subcommand("normalize", "Remove invisible characters and canonicalize encodings");
  auto* filter = app.add_subcommand("filter", "Normalize, repair delimiter spaces and apply quality filters");
  filter->add_option("--rejects", rejects, "Write rejected ids and rules here");
  auto* segment = app.add_subcommand("segment", "Word-segment, keeping functional spaces");
  auto* train = app.add_subcommand("train-tokenizer", "Train a Unigram subword vocabulary");
  train->add_option("--mode", mode, "word or phrase")->check(CLI::IsMember({"word", "phrase"}));
  train->add_option("--vocab-size", vocab_size, "Target number of pieces");
  auto* encode = app.add_subcommand("encode", "Encode segmented text to piece ids");
  auto* decode = app.add_subcommand("decode", "Decode piece ids to text");
  auto* noise = app.add_subcommand("noise", "Build masked denoising pairs");
  noise->add_flag("--binary", binary, "Write the binary pair format");
  auto* eval = app.add_subcommand("eval", "Score hypotheses with and without functional spaces");
  eval->add_option("--hyp", hyp, "Hypothesis lines")->required();
  eval->add_option("--ref", ref, "Reference lines")->required();
  eval->add_option("--baseline", baseline, "Second system for paired bootstrap");
  eval->add_option("--metric", metric, "bleu, chrf or rougeL")->check(CLI::IsMember({"bleu", "chrf", "rougeL"}));
  eval->add_option("--resamples", resamples, "Bootstrap resamples")->check(CLI::PositiveNumber);
  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  auto* pipeline = app.add_subcommand("pipeline", "Run the configured stages end to end");

  for (auto* sub : {normalize, filter, segment, train, encode, decode, noise, eval, stats, pipeline}) {
    AddCommon(sub, &o);
  }
  for (auto* sub : {segment, eval, stats}) sub->add_option("--lexicon", o.lexicon, "Word list");
  for (auto* sub : {encode, decode, noise, stats}) sub->add_option("--vocab", o.vocab, "Vocabulary file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*normalize) return RunNormalize(o);
    if (*filter) return RunFilter(o, rejects);
    if (*segment) return RunSegment(o);
    if (*train) return RunTrainTokenizer(o, mode, vocab_size);
    if (*encode) return RunEncode(o);
    if (*decode) return RunDecode(o);
    if (*noise) return RunNoise(o, binary);
    if (*eval) return RunEval(o, hyp, ref, baseline, metric, resamples);
    if (*stats) return RunStats(o);
    if (*pipeline) return RunPipelineCommand(o);
  } catch (const kmtext::IngestionError& e) {
    std::cerr << "ingestion error: " << e.what() << '\n';
    return kExitIngestion;
  } catch (const kmtext::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const kmtext::LengthMismatch& e) {
    std::cerr << "ingestion error: " << e.what() << '\n';
    return kExitIngestion;
  } catch (const kmtext::EmptyReference& e) {
    std::cerr << "ingestion error: " << e.what() << '\n';
    return kExitIngestion;
  } catch (const kmtext::Error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInvariant;
  }
  return kExitConfig;
}
