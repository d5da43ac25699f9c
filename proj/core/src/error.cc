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

#include "ehrflow/error.h"

#include <string>

namespace ehrflow {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kDanglingReference: return "DanglingReference";
    case ErrorCode::kDuplicatePrimaryKey: return "DuplicatePrimaryKey";
    case ErrorCode::kInvalidSchema: return "InvalidSchema";
    case ErrorCode::kUnknownResource: return "UnknownResource";
    case ErrorCode::kNoRecognizedFiles: return "NoRecognizedFiles";
    case ErrorCode::kTypeCoercionError: return "TypeCoercionError";
    case ErrorCode::kUnknownVariableInExpectations:
      return "UnknownVariableInExpectations";
    case ErrorCode::kNonBinaryVariable: return "NonBinaryVariable";
    case ErrorCode::kMissingAnchorTime: return "MissingAnchorTime";
    case ErrorCode::kUnknownTargetEntity: return "UnknownTargetEntity";
    case ErrorCode::kMissingParam: return "MissingParam";
    case ErrorCode::kUnknownEntity: return "UnknownEntity";
    case ErrorCode::kSingularFit: return "SingularFit";
    case ErrorCode::kDegenerateFold: return "DegenerateFold";
    case ErrorCode::kAllTrialsFailed: return "AllTrialsFailed";
    case ErrorCode::kTooFewRows: return "TooFewRows";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace ehrflow
