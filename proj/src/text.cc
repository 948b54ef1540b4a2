// Copyright 2026 The xlet Authors.
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

#include "xlet/text.h"

#include <locale.h>
#include <wctype.h>

#include <charconv>
#include <cmath>

namespace xlet {
namespace {

// The C.UTF-8 locale carries the full Unicode case tables in glibc.
locale_t Utf8Locale() {
  static locale_t loc = [] {
    locale_t l = newlocale(LC_CTYPE_MASK, "C.UTF-8", static_cast<locale_t>(0));
    if (l == static_cast<locale_t>(0)) {
      l = newlocale(LC_CTYPE_MASK, "C.utf8", static_cast<locale_t>(0));
    }
    return l;
  }();
  return loc;
}

// Decodes one code point at text[pos]. Returns the sequence length, or 0 for
// an invalid sequence.
int DecodeUtf8(std::string_view text, size_t pos, char32_t *cp) {
  auto b = static_cast<unsigned char>(text[pos]);
  int len;
  char32_t value;
  if (b < 0x80) {
    *cp = b;
    return 1;
  } else if ((b & 0xE0) == 0xC0) {
    len = 2;
    value = b & 0x1F;
  } else if ((b & 0xF0) == 0xE0) {
    len = 3;
    value = b & 0x0F;
  } else if ((b & 0xF8) == 0xF0) {
    len = 4;
    value = b & 0x07;
  } else {
    return 0;
  }
  if (pos + len > text.size()) return 0;
  for (int i = 1; i < len; ++i) {
    auto c = static_cast<unsigned char>(text[pos + i]);
    if ((c & 0xC0) != 0x80) return 0;
    value = (value << 6) | (c & 0x3F);
  }
  // Reject overlong encodings and surrogates.
  static const char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (value < kMin[len] || value > 0x10FFFF ||
      (value >= 0xD800 && value <= 0xDFFF)) {
    return 0;
  }
  *cp = value;
  return len;
}

void EncodeUtf8(char32_t cp, std::string *out) {
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

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

}  // namespace

std::string Lowercase(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  locale_t loc = Utf8Locale();
  size_t pos = 0;
  while (pos < text.size()) {
    char32_t cp;
    int len = DecodeUtf8(text, pos, &cp);
    if (len == 0) {
      out.push_back(text[pos++]);
      continue;
    }
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp >= 'A' && cp <= 'Z' ? cp + 32 : cp));
    } else if (loc != static_cast<locale_t>(0)) {
      EncodeUtf8(static_cast<char32_t>(towlower_l(static_cast<wint_t>(cp), loc)),
                 &out);
    } else {
      out.append(text.substr(pos, len));
    }
    pos += len;
  }
  return out;
}

std::vector<std::string> SplitWhitespace(std::string_view text) {
  std::vector<std::string> tokens;
  size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && IsSpace(text[pos])) ++pos;
    size_t start = pos;
    while (pos < text.size() && !IsSpace(text[pos])) ++pos;
    if (pos > start) tokens.emplace_back(text.substr(start, pos - start));
  }
  return tokens;
}

std::vector<std::string> SplitFields(std::string_view text, char delim) {
  std::vector<std::string> fields;
  size_t start = 0;
  for (;;) {
    size_t end = text.find(delim, start);
    if (end == std::string_view::npos) {
      fields.emplace_back(text.substr(start));
      return fields;
    }
    fields.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
}

std::string Join(const std::vector<std::string> &parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

std::string FormatTypeSet(const TypeSet &types) {
  std::string out;
  for (TypeId id : types) {
    if (!out.empty()) out.push_back(',');
    out.append(std::to_string(id));
  }
  return out;
}

TypeSet ParseTypeSet(std::string_view text) {
  TypeSet types;
  if (text.empty()) return types;
  for (const std::string &field : SplitFields(text, ',')) {
    int64_t id = ParseInt(field);
    if (id < 0 || id > INT32_MAX) {
      throw ParseError("type id out of range: " + field);
    }
    types.insert(static_cast<TypeId>(id));
  }
  return types;
}

int64_t ParseInt(std::string_view text) {
  int64_t value = 0;
  const char *end = text.data() + text.size();
  auto result = std::from_chars(text.data(), end, value);
  if (text.empty() || result.ec != std::errc() || result.ptr != end) {
    throw ParseError("invalid integer: '" + std::string(text) + "'");
  }
  return value;
}

double ParseDouble(std::string_view text) {
  double value = 0;
  const char *end = text.data() + text.size();
  auto result = std::from_chars(text.data(), end, value);
  if (text.empty() || result.ec != std::errc() || result.ptr != end) {
    throw ParseError("invalid number: '" + std::string(text) + "'");
  }
  return value;
}

std::string FormatDouble(double value) {
  char buf[64];
  auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

}  // namespace xlet
