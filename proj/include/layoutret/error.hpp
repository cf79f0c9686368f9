// Copyright 2026 The layoutret Authors.
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

#ifndef LAYOUTRET_ERROR_HPP_
#define LAYOUTRET_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace layoutret {

// A caller broke an operation's precondition (dimension mismatch, empty
// input where one is required, non-positive temperature, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Well-formed input that is semantically invalid: unknown tag strings,
// dangling ids, duplicate ids, missing vectors.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FormatErrorKind {
  kBadMagic,
  kUnsupportedVersion,
  kTruncated,
  kDuplicateId,
  kDimensionMismatch,
  kMalformed,
};

std::string_view FormatErrorKindName(FormatErrorKind kind);

// A binary or JSON artifact failed to decode. The kind names the first
// violation found.
class FormatError : public std::runtime_error {
 public:
  FormatError(FormatErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(FormatErrorKindName(kind)) + ": " +
                           detail),
        kind_(kind) {}

  FormatErrorKind kind() const noexcept { return kind_; }

 private:
  FormatErrorKind kind_;
};

inline std::string_view FormatErrorKindName(FormatErrorKind kind) {
  switch (kind) {
    case FormatErrorKind::kBadMagic:
      return "bad magic";
    case FormatErrorKind::kUnsupportedVersion:
      return "unsupported version";
    case FormatErrorKind::kTruncated:
      return "truncated payload";
    case FormatErrorKind::kDuplicateId:
      return "duplicate id";
    case FormatErrorKind::kDimensionMismatch:
      return "dimension mismatch";
    case FormatErrorKind::kMalformed:
      return "malformed";
  }
  return "unknown";
}

}  // namespace layoutret

#endif  // LAYOUTRET_ERROR_HPP_
