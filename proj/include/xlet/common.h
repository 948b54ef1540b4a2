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

#ifndef XLET_COMMON_H_
#define XLET_COMMON_H_

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace xlet {

// Dense identifier of a type in a TypeOntology.
using TypeId = int32_t;

// Gold or predicted type sets are kept ordered so that every serialization
// is deterministic.
using TypeSet = std::set<TypeId>;

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input file could not be read or a record failed to parse.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Invalid or infeasible configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Data violates a documented invariant (schema mismatch, bad adjudication,
// non-finite loss, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Unknown key (type id, qid) requested from a table.
class LookupError : public Error {
 public:
  using Error::Error;
};

}  // namespace xlet

#endif  // XLET_COMMON_H_
