// Copyright 2026 The DiADEM Authors. All Rights Reserved.
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

namespace diadem {

enum class ErrorCode {
  // Input / validation failures (CLI exit code 2).
  kMissingColumn,
  kUnknownCategory,
  kUnknownReference,
  kDuplicateAnnotation,
  kInvalidLabel,
  kEmptyCorpus,
  kInconsistentWidth,
  kNoTextAvailable,
  kDegenerateSplit,
  kInvalidAxis,
  kInvalidNoise,
  kInvalidArgument,
  kAxisMismatch,
  kDimensionMismatch,
  kFusionShapeError,
  kLabelOutOfRange,
  kLengthMismatch,
  kEmptyInput,
  kNotNormalized,
  kTooFewItems,
  kTraceMismatch,
  kConfigError,
  kSchemaMismatch,
  kCheckpointCorrupt,
  kIoError,
  // Runtime failures (CLI exit code 1).
  kNonFiniteLoss,
};

std::string_view error_code_name(ErrorCode code);

/// True for errors caused by bad inputs rather than by a failed computation.
bool is_input_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace diadem
