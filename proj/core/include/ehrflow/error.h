/*
 * Copyright 2026 The ehrflow Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef EHRFLOW_ERROR_H_
#define EHRFLOW_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace ehrflow {

enum class ErrorCode {
  kParseError,
  kDanglingReference,
  kDuplicatePrimaryKey,
  kInvalidSchema,
  kUnknownResource,
  kNoRecognizedFiles,
  kTypeCoercionError,
  kUnknownVariableInExpectations,
  kNonBinaryVariable,
  kMissingAnchorTime,
  kUnknownTargetEntity,
  kMissingParam,
  kUnknownEntity,
  kSingularFit,
  kDegenerateFold,
  kAllTrialsFailed,
  kTooFewRows,
  kLengthMismatch,
  kInvalidArgument,
  kIoError,
};

// Stable, human-readable name of an error code ("DanglingReference", ...).
std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (and the CLI) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ehrflow

#endif  // EHRFLOW_ERROR_H_
