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

#include "diadem/error.h"

namespace diadem {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kUnknownCategory: return "UnknownCategory";
    case ErrorCode::kUnknownReference: return "UnknownReference";
    case ErrorCode::kDuplicateAnnotation: return "DuplicateAnnotation";
    case ErrorCode::kInvalidLabel: return "InvalidLabel";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kInconsistentWidth: return "InconsistentWidth";
    case ErrorCode::kNoTextAvailable: return "NoTextAvailable";
    case ErrorCode::kDegenerateSplit: return "DegenerateSplit";
    case ErrorCode::kInvalidAxis: return "InvalidAxis";
    case ErrorCode::kInvalidNoise: return "InvalidNoise";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kAxisMismatch: return "AxisMismatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kFusionShapeError: return "FusionShapeError";
    case ErrorCode::kLabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kNotNormalized: return "NotNormalized";
    case ErrorCode::kTooFewItems: return "TooFewItems";
    case ErrorCode::kTraceMismatch: return "TraceMismatch";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kCheckpointCorrupt: return "CheckpointCorrupt";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) {
  return code != ErrorCode::kNonFiniteLoss;
}

}  // namespace diadem
