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

#include "roleeval/error.hpp"

namespace roleeval {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kProviderError: return "ProviderError";
    case ErrorKind::kTransientProviderError: return "TransientProviderError";
    case ErrorKind::kAuthError: return "AuthError";
    case ErrorKind::kEmptyCompletion: return "EmptyCompletion";
    case ErrorKind::kMockMiss: return "MockMiss";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kIoError: return "IoError";
    case ErrorKind::kInvalidProfile: return "InvalidProfile";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kPreconditionViolation: return "PreconditionViolation";
    case ErrorKind::kInvalidParameters: return "InvalidParameters";
    case ErrorKind::kConfigError: return "ConfigError";
    case ErrorKind::kInsufficientPool: return "InsufficientPool";
    case ErrorKind::kEmptyInput: return "EmptyInput";
    case ErrorKind::kUnknownQuestion: return "UnknownQuestion";
    case ErrorKind::kMissingAnswers: return "MissingAnswers";
    case ErrorKind::kMissingResponse: return "MissingResponse";
    case ErrorKind::kConflict: return "ConflictError";
    case ErrorKind::kUnknownSession: return "UnknownSession";
    case ErrorKind::kUnknownPair: return "UnknownPair";
    case ErrorKind::kDuplicateVerdict: return "DuplicateVerdict";
    case ErrorKind::kSessionComplete: return "SessionComplete";
    case ErrorKind::kSessionIncomplete: return "SessionIncomplete";
    case ErrorKind::kJudgeParseError: return "JudgeParseError";
    case ErrorKind::kEmptyGroup: return "EmptyGroup";
    case ErrorKind::kDegenerateVector: return "DegenerateVector";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::vector<std::string> details)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
      kind_(kind),
      details_(std::move(details)) {}

}  // namespace roleeval
