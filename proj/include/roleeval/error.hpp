// Copyright 2026 The roleeval Authors.
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
#include <string_view>
#include <vector>

namespace roleeval {

enum class ErrorKind {
  kProviderError,
  kTransientProviderError,
  kAuthError,
  kEmptyCompletion,
  kMockMiss,
  kParseError,
  kIoError,
  kInvalidProfile,
  kInvalidArgument,
  kPreconditionViolation,
  kInvalidParameters,
  kConfigError,
  kInsufficientPool,
  kEmptyInput,
  kUnknownQuestion,
  kMissingAnswers,
  kMissingResponse,
  kConflict,
  kUnknownSession,
  kUnknownPair,
  kDuplicateVerdict,
  kSessionComplete,
  kSessionIncomplete,
  kJudgeParseError,
  kEmptyGroup,
  kDegenerateVector,
};

std::string_view error_kind_name(ErrorKind kind);

// All failures raised by the harness. `details` carries the offending
// identifiers (missing question ids, empty categories, ...) so callers can
// report them without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::vector<std::string> details = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  ErrorKind kind_;
  std::vector<std::string> details_;
};

}  // namespace roleeval
