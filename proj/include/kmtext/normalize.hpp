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

// Khmer text normalization: invisible character removal followed by
// rewriting of ambiguous codepoint sequences to a canonical encoding.
//
// The rewrite rules are data. A RuleTable verifies at construction that its
// rules terminate and are locally confluent on every critical pair, so the
// result of Apply() does not depend on which matching rule fires first.

#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "kmtext/error.hpp"
#include "kmtext/unicode.hpp"

namespace kmtext {

class InvisibleSet {
 public:
  InvisibleSet() = default;
  explicit InvisibleSet(std::set<char32_t> codepoints)
      : codepoints_(std::move(codepoints)) {}

  // The 29 non-printing codepoints stripped from web-crawled Khmer text.
  static const InvisibleSet& Default() {
    static const InvisibleSet kDefault(std::set<char32_t>{
        0x00AD, 0x17B4, 0x17B5, 0x180B, 0x180C, 0x180D, 0x180E, 0x200B,
        0x200C, 0x200D, 0x200E, 0x200F, 0x202A, 0x202B, 0x202C, 0x202D,
        0x2060, 0x2061, 0x2063, 0x206E, 0xFE0E, 0xFE0F, 0xFEFF, 0xE0062,
        0xE0065, 0xE0067, 0xE006E, 0xE007F, 0xE01D3});
    return kDefault;
  }

  // One `U+XXXX` per line; blank lines and `#` comments ignored.
  static InvisibleSet Parse(std::istream& in) {
    std::set<char32_t> cps;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      std::istringstream fields(line);
      std::string tok;
      if (!(fields >> tok)) continue;
      cps.insert(ParseHexCodepoint(tok, lineno));
    }
    return InvisibleSet(std::move(cps));
  }

  bool contains(char32_t c) const { return codepoints_.count(c) != 0; }
  size_t size() const { return codepoints_.size(); }
  const std::set<char32_t>& codepoints() const { return codepoints_; }

  static char32_t ParseHexCodepoint(std::string_view tok, size_t lineno) {
    if (tok.size() > 2 && (tok[0] == 'U' || tok[0] == 'u') && tok[1] == '+') {
      tok.remove_prefix(2);
    } else if (tok.size() > 2 && tok[0] == '0' && (tok[1] == 'x' || tok[1] == 'X')) {
      tok.remove_prefix(2);
    }
    if (tok.empty() || tok.size() > 6) {
      throw MalformedRuleTable("line " + std::to_string(lineno) +
                               ": bad codepoint '" + std::string(tok) + "'");
    }
    char32_t v = 0;
    for (char ch : tok) {
      int d;
      if (ch >= '0' && ch <= '9') d = ch - '0';
      else if (ch >= 'a' && ch <= 'f') d = ch - 'a' + 10;
      else if (ch >= 'A' && ch <= 'F') d = ch - 'A' + 10;
      else
        throw MalformedRuleTable("line " + std::to_string(lineno) +
                                 ": bad codepoint '" + std::string(tok) + "'");
      v = v * 16 + d;
    }
    if (v > 0x10FFFF) {
      throw MalformedRuleTable("line " + std::to_string(lineno) +
                               ": codepoint out of range");
    }
    return v;
  }

 private:
  std::set<char32_t> codepoints_;
};

struct RewriteRule {
  std::u32string pattern;
  std::u32string replacement;
  std::string rule_id;

  bool operator==(const RewriteRule&) const = default;
};

class RuleTable {
 public:
  // Throws MalformedRuleTable when a rule is degenerate, the rules do not
  // terminate, or two overlapping rules lead to different normal forms.
  RuleTable(std::vector<RewriteRule> rules, std::string version)
      : rules_(std::move(rules)), version_(std::move(version)) {
    Index();
    Validate();
  }

  static const RuleTable& Default();

  // Format: `rule_id<TAB>pattern<TAB>replacement`, where pattern and
  // replacement are space-separated hex codepoints (`U+` prefix optional).
  // A `# version: <v>` comment sets the version string.
  static RuleTable Parse(std::istream& in) {
    std::vector<RewriteRule> rules;
    std::string version = "unversioned";
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.rfind("# version:", 0) == 0) {
        version = Trim(line.substr(10));
        continue;
      }
      if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      if (Trim(line).empty()) continue;
      std::vector<std::string> cols;
      std::stringstream ss(line);
      std::string col;
      while (std::getline(ss, col, '\t')) cols.push_back(col);
      if (cols.size() == 2) cols.emplace_back();
      if (cols.size() != 3) {
        throw MalformedRuleTable("line " + std::to_string(lineno) +
                                 ": expected 3 tab-separated columns");
      }
      rules.push_back({ParseHexList(cols[1], lineno), ParseHexList(cols[2], lineno),
                       Trim(cols[0])});
    }
    return RuleTable(std::move(rules), version);
  }

  std::string Serialize() const {
    std::string out = "# version: " + version_ + "\n";
    for (const auto& r : rules_) {
      out += r.rule_id + "\t" + HexList(r.pattern) + "\t" + HexList(r.replacement) + "\n";
    }
    return out;
  }

  // Rewrites left to right; at each position the longest matching pattern
  // wins, ties going to the earlier rule. After a rewrite the scan resumes
  // far enough back to catch matches created by the replacement, so the
  // output contains no pattern.
  std::u32string Apply(std::u32string_view text) const {
    std::u32string out(text);
    const size_t back = max_pattern_len_ > 0 ? max_pattern_len_ - 1 : 0;
    const size_t step_limit = 64 * (out.size() + 16) * (max_pattern_len_ + 1);
    size_t steps = 0;
    size_t i = 0;
    while (i < out.size()) {
      const RewriteRule* rule = MatchAt(out, i);
      if (rule == nullptr) {
        ++i;
        continue;
      }
      if (++steps > step_limit) {
        throw InvariantViolation("rule table '" + version_ +
                                 "' did not reach a fixpoint");
      }
      out.replace(i, rule->pattern.size(), rule->replacement);
      i = i >= back ? i - back : 0;
    }
    return out;
  }

  const RewriteRule* MatchAt(std::u32string_view s, size_t i) const {
    auto it = by_first_.find(s[i]);
    if (it == by_first_.end()) return nullptr;
    for (size_t idx : it->second) {
      const auto& p = rules_[idx].pattern;
      if (s.substr(i, p.size()) == p) return &rules_[idx];
    }
    return nullptr;
  }

  bool ContainsPattern(std::u32string_view s) const {
    for (size_t i = 0; i < s.size(); ++i) {
      if (MatchAt(s, i) != nullptr) return true;
    }
    return false;
  }

  const std::vector<RewriteRule>& rules() const { return rules_; }
  const std::string& version() const { return version_; }

  // Every codepoint that some replacement can introduce.
  std::set<char32_t> ReplacementCodepoints() const {
    std::set<char32_t> out;
    for (const auto& r : rules_) out.insert(r.replacement.begin(), r.replacement.end());
    return out;
  }

 private:
  static std::string Trim(std::string s) {
    const auto ws = " \t\r\n";
    s.erase(0, s.find_first_not_of(ws));
    s.erase(s.find_last_not_of(ws) + 1);
    return s;
  }

  static std::u32string ParseHexList(const std::string& col, size_t lineno) {
    std::u32string out;
    std::string cleaned = col;
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    std::istringstream ss(cleaned);
    std::string tok;
    while (ss >> tok) out.push_back(InvisibleSet::ParseHexCodepoint(tok, lineno));
    return out;
  }

  static std::string HexList(std::u32string_view s) {
    std::string out;
    for (char32_t c : s) {
      if (!out.empty()) out += ' ';
      out += FormatCodepoint(c);
    }
    return out;
  }

  void Index() {
    std::unordered_set<std::string> ids;
    for (size_t i = 0; i < rules_.size(); ++i) {
      const auto& r = rules_[i];
      if (r.pattern.empty()) {
        throw MalformedRuleTable("rule '" + r.rule_id + "' has an empty pattern");
      }
      if (r.pattern == r.replacement) {
        throw MalformedRuleTable("rule '" + r.rule_id + "' rewrites to itself");
      }
      if (!ids.insert(r.rule_id).second) {
        throw MalformedRuleTable("duplicate rule id '" + r.rule_id + "'");
      }
      by_first_[r.pattern[0]].push_back(i);
      max_pattern_len_ = std::max(max_pattern_len_, r.pattern.size());
    }
    for (auto& [first, idxs] : by_first_) {
      std::stable_sort(idxs.begin(), idxs.end(), [&](size_t a, size_t b) {
        return rules_[a].pattern.size() > rules_[b].pattern.size();
      });
    }
  }

  // Critical pairs: each pattern on its own, and every overlap where a
  // suffix of one pattern is a prefix of another. Rewriting such a string
  // with each applicable rule first must lead to one normal form.
  void Validate() const {
    std::vector<std::u32string> critical;
    for (const auto& p : rules_) {
      critical.push_back(p.pattern);
      for (const auto& q : rules_) {
        const size_t lim = std::min(p.pattern.size(), q.pattern.size());
        for (size_t k = 1; k < lim; ++k) {
          if (p.pattern.compare(p.pattern.size() - k, k, q.pattern, 0, k) == 0) {
            critical.push_back(p.pattern + q.pattern.substr(k));
          }
        }
      }
    }
    for (const auto& w : critical) {
      std::u32string nf;
      try {
        nf = Apply(w);
      } catch (const InvariantViolation&) {
        throw MalformedRuleTable("rules do not terminate on " + HexList(w));
      }
      if (ContainsPattern(nf)) {
        throw MalformedRuleTable("normal form of " + HexList(w) + " still matches a rule");
      }
      for (size_t i = 0; i < w.size(); ++i) {
        for (const auto& r : rules_) {
          if (w.compare(i, r.pattern.size(), r.pattern) != 0) continue;
          std::u32string once = w;
          once.replace(i, r.pattern.size(), r.replacement);
          if (Apply(once) != nf) {
            throw MalformedRuleTable("rule '" + r.rule_id + "' is not confluent on " +
                                     HexList(w));
          }
        }
      }
    }
  }

  std::vector<RewriteRule> rules_;
  std::string version_;
  std::unordered_map<char32_t, std::vector<size_t>> by_first_;
  size_t max_pattern_len_ = 0;
};

namespace internal {

inline std::vector<RewriteRule> DefaultKhmerRules() {
  std::vector<RewriteRule> rules = {
      // Split vowels typed as two visually equivalent signs.
      {U"\u17C1\u17B8", U"\u17BE", "vowel-oe-split"},
      {U"\u17C1\u17B6", U"\u17C4", "vowel-oo-split"},
      // Deprecated independent vowels.
      {U"\u17A3", U"\u17A2", "indep-qaq-deprecated"},
      {U"\u17A4", U"\u17A2\u17B6", "indep-qaaq-deprecated"},
      // Nikahit follows the vowel it is written with.
      {U"\u17C6\u17B6", U"\u17B6\u17C6", "order-aa-nikahit"},
      {U"\u17C6\u17BB", U"\u17BB\u17C6", "order-u-nikahit"},
  };
  // Subscript RO is stored after any other subscript consonant.
  for (char32_t c = 0x1780; c <= 0x17A2; ++c) {
    if (c == 0x179A) continue;
    rules.push_back({std::u32string{0x17D2, 0x179A, 0x17D2, c},
                     std::u32string{0x17D2, c, 0x17D2, 0x179A},
                     "order-coeng-ro-" + FormatCodepoint(c).substr(2)});
  }
  return rules;
}

}  // namespace internal

inline const RuleTable& RuleTable::Default() {
  static const RuleTable kDefault(internal::DefaultKhmerRules(), "km-default-1");
  return kDefault;
}

inline std::u32string RemoveInvisible(std::u32string_view text,
                                      const InvisibleSet& set = InvisibleSet::Default()) {
  std::u32string out;
  out.reserve(text.size());
  for (char32_t c : text) {
    if (!set.contains(c)) out.push_back(c);
  }
  return out;
}

inline std::string RemoveInvisible(std::string_view utf8,
                                   const InvisibleSet& set = InvisibleSet::Default()) {
  return EncodeUtf8(RemoveInvisible(DecodeUtf8(utf8), set));
}

inline std::u32string NormalizeEncoding(std::u32string_view text,
                                        const RuleTable& table = RuleTable::Default()) {
  return table.Apply(text);
}

inline std::string NormalizeEncoding(std::string_view utf8,
                                     const RuleTable& table = RuleTable::Default()) {
  return EncodeUtf8(table.Apply(DecodeUtf8(utf8)));
}

struct Normalizer {
  InvisibleSet invisible = InvisibleSet::Default();
  RuleTable table = RuleTable::Default();

  // Invisible characters go first; they can split a rule pattern.
  std::u32string operator()(std::u32string_view text) const {
    return table.Apply(RemoveInvisible(text, invisible));
  }
  std::string operator()(std::string_view utf8) const {
    return EncodeUtf8((*this)(DecodeUtf8(utf8)));
  }
};

inline std::u32string Normalize(std::u32string_view text) {
  return RuleTable::Default().Apply(RemoveInvisible(text));
}

inline std::string Normalize(std::string_view utf8) {
  return EncodeUtf8(Normalize(DecodeUtf8(utf8)));
}

}  // namespace kmtext
