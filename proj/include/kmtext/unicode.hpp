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

#include <unicode/uchar.h>
#include <unicode/uscript.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace kmtext {

inline constexpr char32_t kSpace = U' ';
inline constexpr char32_t kReplacementChar = 0xFFFD;

// Decodes UTF-8. Malformed sequences become U+FFFD, one per offending byte.
inline std::u32string DecodeUtf8(std::string_view in) {
  std::u32string out;
  out.reserve(in.size());
  const auto* s = reinterpret_cast<const unsigned char*>(in.data());
  const size_t n = in.size();
  size_t i = 0;
  while (i < n) {
    const unsigned char c = s[i];
    if (c < 0x80) {
      out.push_back(c);
      ++i;
      continue;
    }
    int len = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if ((c & 0xE0) == 0xC0) {
      len = 2, cp = c & 0x1F, min = 0x80;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3, cp = c & 0x0F, min = 0x800;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4, cp = c & 0x07, min = 0x10000;
    }
    bool ok = len > 0 && i + len <= n;
    for (int k = 1; ok && k < len; ++k) {
      if ((s[i + k] & 0xC0) != 0x80) ok = false;
      else cp = (cp << 6) | (s[i + k] & 0x3F);
    }
    if (ok && (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))) {
      ok = false;
    }
    if (!ok) {
      out.push_back(kReplacementChar);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline void AppendUtf8(char32_t cp, std::string* out) {
  if (cp < 0x80) {
    out->push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out->push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out->push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out->push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out->push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out->push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out->push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out->push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out->push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out->push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string EncodeUtf8(std::u32string_view in) {
  std::string out;
  out.reserve(in.size() * 3);
  for (char32_t cp : in) AppendUtf8(cp, &out);
  return out;
}

// Number of code points in a UTF-8 string (after U+FFFD substitution).
inline size_t CodepointLength(std::string_view utf8) {
  return DecodeUtf8(utf8).size();
}

// Coarse character classes shared by profiling, segmentation and language
// identification. Assignment is first-match in declaration order.
enum class CharClass : uint8_t {
  kSpace,        // U+0020 only
  kDigit,        // general category Nd
  kEmoji,        // Emoji_Presentation
  kPunct,        // general category P*, plus Khmer signs U+17D4..U+17DA
  kKhmer,        // script=Khmer (letters, dependent vowels, signs)
  kLatin,        // script=Latin
  kOtherLetter,  // L* or M* in any other non-common script
  kInherited,    // script=Inherited (combining marks that follow a base)
  kOther,        // symbols, controls, other whitespace
};

inline bool IsKhmerPunct(char32_t c) { return c >= 0x17D4 && c <= 0x17DA; }

inline CharClass Classify(char32_t c) {
  if (c == kSpace) return CharClass::kSpace;
  const auto uc = static_cast<UChar32>(c);
  const uint32_t mask = U_GET_GC_MASK(uc);
  if (mask & U_GC_ND_MASK) return CharClass::kDigit;
  if (u_hasBinaryProperty(uc, UCHAR_EMOJI_PRESENTATION)) return CharClass::kEmoji;
  if ((mask & U_GC_P_MASK) || IsKhmerPunct(c)) return CharClass::kPunct;
  UErrorCode err = U_ZERO_ERROR;
  const UScriptCode script = uscript_getScript(uc, &err);
  if (script == USCRIPT_KHMER) return CharClass::kKhmer;
  if (script == USCRIPT_LATIN) return CharClass::kLatin;
  if (script == USCRIPT_INHERITED) return CharClass::kInherited;
  if (script != USCRIPT_COMMON && (mask & (U_GC_L_MASK | U_GC_M_MASK))) {
    return CharClass::kOtherLetter;
  }
  return CharClass::kOther;
}

inline bool IsLetterClass(CharClass c) {
  return c == CharClass::kKhmer || c == CharClass::kLatin ||
         c == CharClass::kOtherLetter;
}

// Whitespace as recognised by Python's str.split(); needed for bit-compatible
// BLEU/ChrF tokenization.
inline bool IsPyWhitespace(char32_t c) {
  switch (c) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
    case 0x1C: case 0x1D: case 0x1E: case 0x1F: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

inline std::string FormatCodepoint(char32_t c) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string digits;
  for (char32_t v = c; v != 0 || digits.size() < 4; v >>= 4) {
    digits.insert(digits.begin(), kHex[v & 0xF]);
  }
  return "U+" + digits;
}

}  // namespace kmtext
