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
#include <iosfwd>
#include <string>
#include <vector>

#include "cli/run_config.h"
#include "diadem/evaluation.h"
#include "diadem/training.h"

namespace diadem::cli {

// Fixed output file names.
inline constexpr const char* kCheckpointFile = "checkpoint.bin";
inline constexpr const char* kTrainReportFile = "train.jsonl";
inline constexpr const char* kResolvedConfigFile = "resolved_config.txt";
inline constexpr const char* kEvalJsonFile = "eval.json";
inline constexpr const char* kEvalTableFile = "eval.txt";
inline constexpr const char* kAlphaFile = "alpha.json";
inline constexpr const char* kDisagreementFile = "disagreement.tsv";

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitInput = 2 };

/// Which side of the configured split `evaluate` scores.
enum class EvalView { kTest, kTrain, kAll };

/// Loads, featurizes and splits per config, trains on the train side and
/// writes checkpoint, train report and resolved config into `out_dir`.
TrainReport cmd_train(const RunConfig& config, const std::filesystem::path& out_dir,
                      std::ostream& log);

/// Scores a checkpoint on one side of the configured split and writes
/// eval.json, eval.txt and disagreement.tsv into `out_dir`.
EvalReport cmd_evaluate(const RunConfig& config, const std::filesystem::path& checkpoint,
                        EvalView view, const std::filesystem::path& out_dir, std::ostream& log);

/// Prints the alpha table; writes alpha.json when `out_dir` is not empty.
void cmd_report_alpha(const std::filesystem::path& checkpoint, const std::filesystem::path& out_dir,
                      std::ostream& log);

/// Writes a synthetic corpus (items.csv, annotators.csv, annotations.csv).
void cmd_synth(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

/// Full command-line entry point; returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace diadem::cli
