// Copyright 2026 The text2art Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TEXT2ART_ERROR_HPP
#define TEXT2ART_ERROR_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace text2art {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument values or shapes passed by the caller.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Input is structurally fine but does not match the expected schema
/// (missing column, dimension mismatch, ...).
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Two inputs claim the same identity.
class ConflictError : public Error {
 public:
  using Error::Error;
};

/// Unrecognised binary format (magic / version).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Binary file ends early or is otherwise damaged.
class CorruptionError : public Error {
 public:
  CorruptionError(const std::string& what, std::uint64_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

/// A value that must be normalized has (near) zero norm.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown, e.g. a covariance that is not positive definite.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition on the inputs was violated.
class ContractError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace text2art

#endif  // TEXT2ART_ERROR_HPP
