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

#ifndef XLET_TEXT_H_
#define XLET_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

#include "xlet/common.h"

namespace xlet {

// Lowercases a UTF-8 string using Unicode simple case mapping. Invalid byte
// sequences are copied through unchanged.
std::string Lowercase(std::string_view text);

// Splits on runs of ASCII whitespace; never yields empty tokens.
std::vector<std::string> SplitWhitespace(std::string_view text);

// Splits on a single delimiter character, keeping empty fields.
std::vector<std::string> SplitFields(std::string_view text, char delim);

std::string Join(const std::vector<std::string> &parts, std::string_view sep);

// Comma-separated type ids, e.g. "0,3,17". The empty set is "".
std::string FormatTypeSet(const TypeSet &types);
TypeSet ParseTypeSet(std::string_view text);

// Strict integer parsing; throws ParseError on trailing garbage or overflow.
int64_t ParseInt(std::string_view text);
double ParseDouble(std::string_view text);

// Shortest decimal representation that parses back to the same double.
std::string FormatDouble(double value);

}  // namespace xlet

#endif  // XLET_TEXT_H_
