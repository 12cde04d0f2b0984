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

// Line-oriented document readers and writers.
//
// JSON-lines documents look like {"id": "...", "text": "...", "lang": "km",
// "source": "..."}; only "text" is required. Plain-text input is one
// document per line with ids "<prefix><line number>".

#pragma once

#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "kmtext/curate.hpp"
#include "kmtext/error.hpp"
#include "kmtext/noise.hpp"
#include "kmtext/segment.hpp"

namespace kmtext {

enum class InputFormat { kText, kJsonl };

inline InputFormat ParseFormat(std::string_view s) {
  if (s == "text") return InputFormat::kText;
  if (s == "jsonl") return InputFormat::kJsonl;
  throw ConfigError("unknown format '" + std::string(s) + "'");
}

inline Document ParseDocumentJson(const std::string& line, size_t lineno, Lang default_lang) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw IngestionError(std::string("malformed JSON: ") + e.what(), lineno);
  }
  if (!j.is_object() || !j.contains("text") || !j["text"].is_string()) {
    throw IngestionError("record needs a string \"text\" field", lineno);
  }
  Document d;
  d.text = j["text"].get<std::string>();
  d.id = j.contains("id") ? (j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump())
                          : "line-" + std::to_string(lineno);
  d.lang = default_lang;
  if (j.contains("lang")) {
    if (!j["lang"].is_string()) throw IngestionError("\"lang\" must be a string", lineno);
    try {
      d.lang = ParseLang(j["lang"].get<std::string>());
    } catch (const ConfigError& e) {
      throw IngestionError(e.what(), lineno);
    }
  }
  if (j.contains("source") && j["source"].is_string()) d.source = j["source"].get<std::string>();
  return d;
}

// Streaming reader; tracks line numbers for diagnostics.
class DocumentReader {
 public:
  DocumentReader(std::istream& in, InputFormat format, Lang default_lang = Lang::kKm)
      : in_(in), format_(format), default_lang_(default_lang) {}

  bool Next(Document* doc) {
    std::string line;
    while (std::getline(in_, line)) {
      ++lineno_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (format_ == InputFormat::kText) {
        *doc = {"line-" + std::to_string(lineno_), line, default_lang_, ""};
        return true;
      }
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      *doc = ParseDocumentJson(line, lineno_, default_lang_);
      return true;
    }
    return false;
  }

  // Up to `n` documents; empty at end of input.
  std::vector<Document> NextBatch(size_t n) {
    std::vector<Document> out;
    Document d;
    while (out.size() < n && Next(&d)) out.push_back(std::move(d));
    return out;
  }

  size_t line() const { return lineno_; }

 private:
  std::istream& in_;
  InputFormat format_;
  Lang default_lang_;
  size_t lineno_ = 0;
};

inline std::vector<Document> ReadDocuments(std::istream& in, InputFormat format,
                                           Lang default_lang = Lang::kKm) {
  DocumentReader r(in, format, default_lang);
  std::vector<Document> out;
  Document d;
  while (r.Next(&d)) out.push_back(std::move(d));
  return out;
}

inline nlohmann::json DocumentJson(const Document& d) {
  nlohmann::json j = {{"id", d.id}, {"lang", LangCode(d.lang)}, {"text", d.text}};
  if (!d.source.empty()) j["source"] = d.source;
  return j;
}

inline void WriteDocument(const Document& d, InputFormat format, std::ostream& out) {
  if (format == InputFormat::kText) {
    out << d.text << '\n';
  } else {
    out << DocumentJson(d).dump() << '\n';
  }
}

inline nlohmann::json ProfileJson(const CharProfile& p) {
  return {{"n_chars", p.n_chars},         {"n_spaces", p.n_spaces},
          {"n_digits", p.n_digits},       {"n_emoji", p.n_emoji},
          {"n_punct", p.n_punct},         {"n_khmer", p.n_khmer},
          {"n_latin", p.n_latin},         {"n_other_script", p.n_other_script},
          {"max_repeat_run", p.max_repeat_run}, {"max_repeat_total", p.max_repeat_total}};
}

// Rejection log record: {"id", "fired_rule", "profile"}.
inline nlohmann::json RejectionJson(const std::string& id, const FilterVerdict& v) {
  return {{"id", id}, {"fired_rule", v.fired_rule.value_or("")}, {"profile", ProfileJson(v.profile)}};
}

// Segmented document: {"id", "lang", "tokens": [...]}; functional spaces
// appear as " " entries.
inline nlohmann::json SegmentedJson(const std::string& id, Lang lang,
                                    const std::vector<Token>& tokens) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : tokens) arr.push_back(t.surface);
  return {{"id", id}, {"lang", LangCode(lang)}, {"tokens", arr}};
}

struct SegmentedDocument {
  std::string id;
  Lang lang = Lang::kKm;
  std::vector<Token> tokens;
};

inline SegmentedDocument ParseSegmentedJson(const std::string& line, size_t lineno) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw IngestionError(std::string("malformed JSON: ") + e.what(), lineno);
  }
  if (!j.is_object() || !j.contains("tokens") || !j["tokens"].is_array()) {
    throw IngestionError("segmented record needs a \"tokens\" array", lineno);
  }
  SegmentedDocument d;
  d.id = j.value("id", "line-" + std::to_string(lineno));
  try {
    d.lang = ParseLang(j.value("lang", "km"));
  } catch (const ConfigError& e) {
    throw IngestionError(e.what(), lineno);
  }
  for (const auto& t : j["tokens"]) {
    if (!t.is_string() || t.get<std::string>().empty()) {
      throw IngestionError("tokens must be non-empty strings", lineno);
    }
    const std::string s = t.get<std::string>();
    d.tokens.push_back({s, s == " " ? TokenKind::kFunctionalSpace : ClassifyToken(DecodeUtf8(s))});
  }
  return d;
}

inline nlohmann::json PairJson(const TrainingPair& p) {
  return {{"doc_id", p.doc_id},
          {"chunk_index", p.chunk_index},
          {"source_ids", p.source_ids},
          {"target_ids", p.target_ids}};
}

}  // namespace kmtext
