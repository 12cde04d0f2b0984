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

#pragma once

#include <stdexcept>
#include <string>

namespace kmtext {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define KMTEXT_DEFINE_ERROR(Name) \
  class Name : public Error {     \
   public:                        \
    using Error::Error;           \
  }

KMTEXT_DEFINE_ERROR(MalformedRuleTable);
KMTEXT_DEFINE_ERROR(EmptyLexicon);
KMTEXT_DEFINE_ERROR(UnknownLanguage);
KMTEXT_DEFINE_ERROR(TargetBelowCharsetSize);
KMTEXT_DEFINE_ERROR(InvalidId);
KMTEXT_DEFINE_ERROR(OverlappingSpans);
KMTEXT_DEFINE_ERROR(LengthMismatch);
KMTEXT_DEFINE_ERROR(EmptyReference);
KMTEXT_DEFINE_ERROR(EmptyArticle);
KMTEXT_DEFINE_ERROR(UnseenSymbol);
KMTEXT_DEFINE_ERROR(ConfigError);
KMTEXT_DEFINE_ERROR(InvariantViolation);

#undef KMTEXT_DEFINE_ERROR

// Malformed input record. `line` is 1-based; 0 when unknown.
class IngestionError : public Error {
 public:
  IngestionError(const std::string& what, size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

}  // namespace kmtext
