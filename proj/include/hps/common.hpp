// Copyright 2026 the hps authors
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

#ifndef HPS_COMMON_HPP
#define HPS_COMMON_HPP

#include <stdexcept>
#include <string>

namespace hps {

/// Raised when a caller hands an operation an argument that violates its
/// preconditions (empty stroke list, zero-area region, bad threshold, ...).
class invalid_input : public std::runtime_error {
public:
  explicit invalid_input(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an on-disk artifact (IDX file, JSONL record, pool file, ...)
/// does not match its documented format.
class format_error : public std::runtime_error {
public:
  explicit format_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an internal consistency check fails. Seeing one of these is a
/// bug in the library, not in the caller.
class invariant_violation : public std::logic_error {
public:
  explicit invariant_violation(const std::string& what)
      : std::logic_error(what) {}
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw invalid_input(what);
}

inline void ensure(bool cond, const std::string& what) {
  if (!cond) throw invariant_violation(what);
}

}  // namespace hps

#endif  // HPS_COMMON_HPP
