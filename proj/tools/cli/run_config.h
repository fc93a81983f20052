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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "diadem/dataset.h"
#include "diadem/evaluation.h"
#include "diadem/network.h"
#include "diadem/training.h"

namespace diadem::cli {

/// Everything a run needs. Loaded from a flat `section.key=value` file; any
/// key left out keeps the default below.
struct RunConfig {
  std::filesystem::path items;
  std::filesystem::path annotators;
  std::filesystem::path annotations;
  std::size_t num_classes = 0;  // 0 infers from the data

  FeatureSpec features;
  ModelConfig model;
  TrainConfig train;

  /// Unset trains and evaluates on the whole corpus.
  std::optional<SplitMode> split_mode = SplitMode::kByAnnotator;
  double test_fraction = 0.25;

  EvalOptions eval;
  SynthSpec synth;
  std::size_t synth_axes = 4;
  std::size_t synth_categories = 3;

  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";

  SplitSpec split_spec() const;

  /// Sets the run seed and every component seed derived from it.
  void set_seed(std::uint64_t value);

  /// Cross-field checks; data paths are checked only when `need_data`.
  void validate(bool need_data) const;
};

/// Parses `key=value` lines; '#' starts a comment. Relative data paths are
/// resolved against the config file's directory. Unknown keys and malformed
/// values throw Error(kConfigError) naming the key.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Every field with its effective value, in the same format the parser reads.
std::string resolved_config_text(const RunConfig& config);

}  // namespace diadem::cli
