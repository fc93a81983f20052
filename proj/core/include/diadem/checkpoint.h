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

#include <filesystem>
#include <string>
#include <string_view>

#include "diadem/dataset.h"
#include "diadem/network.h"

namespace diadem {

inline constexpr std::string_view kCheckpointVersion = "diadem-v1";

/// Everything needed to rebuild a model and featurize its inputs.
struct Checkpoint {
  ModelConfig model;
  DemographicSchema schema;
  FeatureSpec features;
  ModelParams params;
};

// Layout:
//   "diadem-v1\n"                       10 bytes
//   header length H                      u64 little-endian
//   JSON header                          H bytes (version, model, schema,
//                                        schema_hash, features, tensors with
//                                        rows/cols/offset, data_bytes, checksum)
//   zero padding to an 8-byte boundary
//   tensor data                          little-endian f64, row-major
// Tensor offsets are relative to the start of the data section.
std::string serialize_checkpoint(const Checkpoint& checkpoint);

/// Throws Error(kCheckpointCorrupt) on any structural or checksum problem.
Checkpoint parse_checkpoint(std::string_view bytes);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Hex form of DemographicSchema::fingerprint().
std::string schema_hash(const DemographicSchema& schema);

}  // namespace diadem
