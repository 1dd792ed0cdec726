// Copyright 2026 The arraycache Authors
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

#include <cstdint>
#include <stdexcept>
#include <string>

namespace arraycache {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed arguments that violate an operation's contract
// (dimensionality mismatch, unknown policy, bad flag values).
class UsageError : public Error {
 public:
  using Error::Error;
};

// An operation's documented precondition does not hold (e.g. splitting a
// chunk whose cells were never loaded).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Malformed or out-of-range input data. `line` is 1-based for text formats
// and the record ordinal for binary formats; 0 when not applicable.
class IngestError : public Error {
 public:
  IngestError(const std::string& what, std::uint64_t line = 0)
      : Error(line == 0 ? what : what + " (line " + std::to_string(line) + ")"),
        line_(line) {}

  std::uint64_t line() const { return line_; }

 private:
  std::uint64_t line_;
};

// Workload or dataset generation parameters cannot produce a valid result.
class GenerationError : public Error {
 public:
  using Error::Error;
};

}  // namespace arraycache
