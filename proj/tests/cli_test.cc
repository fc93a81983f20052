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

#include "cli/commands.h"

#include <json.hpp>

#include <gtest/gtest.h>

#include "cli/run_config.h"
#include "diadem/checkpoint.h"
#include "diadem/error.h"
#include "test_util.h"

namespace diadem::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::fresh_dir;
using testing::read_file;
using testing::write_file;

const fs::path kData = DIADEM_DATA_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string synth_config() { return (kData / "synth20" / "config.txt").string(); }

TEST(Cli, TrainOnBundledFixtureWritesThreeFiles) {
  const auto out = fresh_dir("cli_train");
  const auto r = run({"--config", synth_config(), "--out", out.string(), "train"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(out / kCheckpointFile));
  EXPECT_TRUE(fs::exists(out / kTrainReportFile));
  EXPECT_TRUE(fs::exists(out / kResolvedConfigFile));
  std::istringstream lines(read_file(out / kTrainReportFile));
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    EXPECT_TRUE(json::parse(line).contains("L_dis"));
    ++n;
  }
  EXPECT_EQ(n, 5u);
}

TEST(Cli, SameSeedByteIdenticalCheckpoints) {
  const auto a = fresh_dir("cli_det_a");
  const auto b = fresh_dir("cli_det_b");
  ASSERT_EQ(run({"--config", synth_config(), "--out", a.string(), "--seed", "3", "train"}).code, 0);
  ASSERT_EQ(run({"--config", synth_config(), "--out", b.string(), "--seed", "3", "train"}).code, 0);
  EXPECT_EQ(read_file(a / kCheckpointFile), read_file(b / kCheckpointFile));
  EXPECT_EQ(read_file(a / kTrainReportFile), read_file(b / kTrainReportFile));
  const auto c = fresh_dir("cli_det_c");
  ASSERT_EQ(run({"--config", synth_config(), "--out", c.string(), "--seed", "4", "train"}).code, 0);
  EXPECT_NE(read_file(a / kCheckpointFile), read_file(c / kCheckpointFile));
}

TEST(Cli, ResolvedConfigReproducesTheRun) {
  const auto a = fresh_dir("cli_resolved_a");
  ASSERT_EQ(run({"--config", synth_config(), "--out", a.string(), "--seed", "9", "train"}).code, 0);
  const std::string resolved = read_file(a / kResolvedConfigFile);
  EXPECT_NE(resolved.find("model.d_a="), std::string::npos);
  EXPECT_NE(resolved.find("seed=9"), std::string::npos);
  const auto b = fresh_dir("cli_resolved_b");
  write_file(b / "replay.txt", resolved);
  ASSERT_EQ(run({"--config", (b / "replay.txt").string(), "--out", b.string(), "train"}).code, 0);
  EXPECT_EQ(read_file(a / kCheckpointFile), read_file(b / kCheckpointFile));
}

TEST(Cli, SumFusionShapeErrorBeforeTraining) {
  const auto dir = fresh_dir("cli_sum");
  write_file(dir / "c.txt", read_file(synth_config()) + "model.fusion=sum\nmodel.d_a=4\nmodel.d_I=6\n");
  // The config's data paths are relative to its own directory.
  for (const char* f : {"items.csv", "annotators.csv", "annotations.csv"}) {
    fs::copy_file(kData / "synth20" / f, dir / f);
  }
  const auto r = run({"--config", (dir / "c.txt").string(), "--out", (dir / "out").string(), "train"});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("model.d_a"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("model.d_I"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "out" / kCheckpointFile));
}

TEST(Cli, ConfigErrorsNameTheKey) {
  const auto dir = fresh_dir("cli_cfg");
  write_file(dir / "c.txt", "model.d_a=4\nmodel.widht=3\n");
  auto r = run({"--config", (dir / "c.txt").string(), "train"});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("model.widht"), std::string::npos) << r.err;

  write_file(dir / "c.txt", "train.learning_rate=fast\n");
  r = run({"--config", (dir / "c.txt").string(), "train"});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("train.learning_rate"), std::string::npos) << r.err;

  EXPECT_EQ(run({"train"}).code, kExitInput);
  EXPECT_EQ(run({"frobnicate"}).code, kExitInput);
  EXPECT_EQ(run({"--config", (dir / "nope.txt").string(), "train"}).code, kExitInput);
}

TEST(Cli, EvaluateWritesReports) {
  const auto out = fresh_dir("cli_eval");
  ASSERT_EQ(run({"--config", synth_config(), "--out", out.string(), "train"}).code, 0);
  const auto r = run({"--config", synth_config(), "--out", out.string(), "evaluate"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = json::parse(read_file(out / kEvalJsonFile));
  for (const char* key : {"accuracy", "f1_macro", "f1_weighted", "kappa", "mcc", "jsd", "md", "er",
                          "ece", "var_pearson", "var_spearman", "ent_pearson", "ent_spearman",
                          "collapse_flag", "n_samples", "n_items"}) {
    EXPECT_TRUE(report.contains(key)) << key;
  }
  EXPECT_NEAR(report["er"].get<double>(), report["md"].get<double>() / 2, 1e-15);
  EXPECT_TRUE(fs::exists(out / kEvalTableFile));
  EXPECT_TRUE(fs::exists(out / kDisagreementFile));
  EXPECT_NE(r.out.find("accuracy"), std::string::npos);

  // The training view scores the annotators the model saw.
  const auto train_view = fresh_dir("cli_eval_train");
  ASSERT_EQ(run({"--config", synth_config(), "--out", train_view.string(), "evaluate", "--view",
                 "train", "--checkpoint", (out / kCheckpointFile).string()})
                .code,
            0);
  EXPECT_GT(json::parse(read_file(train_view / kEvalJsonFile))["n_samples"].get<int>(),
            report["n_samples"].get<int>());
}

TEST(Cli, SchemaMismatchIsInputError) {
  const auto out = fresh_dir("cli_schema");
  ASSERT_EQ(run({"--config", synth_config(), "--out", out.string(), "train"}).code, 0);
  const std::string dices = (kData / "dices_shaped" / "config.txt").string();
  const auto r = run({"--config", dices, "--out", out.string(), "evaluate"});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("SchemaMismatch"), std::string::npos) << r.err;
}

TEST(Cli, CorruptCheckpointIsInputError) {
  const auto out = fresh_dir("cli_corrupt");
  write_file(out / kCheckpointFile, "diadem-v1\ngarbage");
  const auto r = run({"--config", synth_config(), "--out", out.string(), "evaluate"});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("CheckpointCorrupt"), std::string::npos) << r.err;
}

TEST(Cli, ConstantPredictorCheckpointFlagsCollapse) {
  const auto out = fresh_dir("cli_collapse");
  ASSERT_EQ(run({"--config", synth_config(), "--out", out.string(), "train"}).code, 0);
  Checkpoint ckpt = read_checkpoint(out / kCheckpointFile);
  ckpt.params.head_annotator.setZero();
  ckpt.params.head_annotator_direct.setZero();
  write_checkpoint(out / kCheckpointFile, ckpt);
  ASSERT_EQ(run({"--config", synth_config(), "--out", out.string(), "evaluate"}).code, 0);
  const auto report = json::parse(read_file(out / kEvalJsonFile));
  EXPECT_EQ(report["collapse_flag"], true);
  EXPECT_EQ(report["kappa"], 0.0);
  EXPECT_NE(read_file(out / kEvalTableFile).find("warning"), std::string::npos);
}

TEST(Cli, ReportAlphaOnUntrainedCheckpoint) {
  const auto dir = fresh_dir("cli_alpha");
  std::string text = read_file(synth_config());
  text.replace(text.find("train.epochs=5"), 14, "train.epochs=0");
  write_file(dir / "c.txt", text);
  for (const char* f : {"items.csv", "annotators.csv", "annotations.csv"}) {
    fs::copy_file(kData / "synth20" / f, dir / f);
  }
  ASSERT_EQ(run({"--config", (dir / "c.txt").string(), "--out", dir.string(), "train"}).code, 0);
  const auto r = run({"--out", dir.string(), "report-alpha"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(read_file(dir / kAlphaFile));
  ASSERT_EQ(j["alpha"].size(), 3u);
  for (const auto& row : j["alpha"]) EXPECT_NEAR(row["alpha"].get<double>(), 1.0 / 3, 1e-12);
  EXPECT_NEAR(j["sum"].get<double>(), 1.0, 1e-9);
  EXPECT_NE(r.out.find("axis_0"), std::string::npos);
}

TEST(Cli, SynthRoundTripAndDeterminism) {
  const auto a = fresh_dir("cli_synth_a");
  const auto b = fresh_dir("cli_synth_b");
  ASSERT_EQ(run({"--out", a.string(), "--seed", "5", "synth"}).code, 0);
  ASSERT_EQ(run({"--out", b.string(), "--seed", "5", "synth"}).code, 0);
  for (const char* f : {"items.csv", "annotators.csv", "annotations.csv"}) {
    EXPECT_EQ(read_file(a / f), read_file(b / f)) << f;
  }
  write_file(a / "run.txt",
             "data.items=items.csv\ndata.annotators=annotators.csv\n"
             "data.annotations=annotations.csv\nfeatures.mode=precomputed\ntrain.epochs=2\n");
  EXPECT_EQ(run({"--config", (a / "run.txt").string(), "--out", (a / "out").string(), "train"}).code, 0);
  EXPECT_EQ(run({"--config", (a / "run.txt").string(), "--out", (a / "out").string(), "evaluate"}).code, 0);
}

TEST(Cli, NoiseFreeSynthFilesKeepPlantedAgreement) {
  const auto dir = fresh_dir("cli_synth_clean");
  write_file(dir / "s.txt", "synth.noise=0\nsynth.items=30\nsynth.annotators=12\nsynth.planted_axis=2\n");
  ASSERT_EQ(run({"--config", (dir / "s.txt").string(), "--out", dir.string(), "synth"}).code, 0);
  const Corpus c = load_corpus(dir / "items.csv", dir / "annotators.csv", dir / "annotations.csv");
  for (const auto& rows : c.annotations_by_item()) {
    for (auto i : rows) {
      for (auto j : rows) {
        const auto& x = c.annotations[i];
        const auto& y = c.annotations[j];
        if (c.annotators[x.annotator].values[2] == c.annotators[y.annotator].values[2]) {
          EXPECT_EQ(x.label, y.label);
        }
      }
    }
  }
}

TEST(Cli, DicesShapedFixtureRunsEndToEnd) {
  const auto out = fresh_dir("cli_dices");
  const std::string cfg = (kData / "dices_shaped" / "config.txt").string();
  ASSERT_EQ(run({"--config", cfg, "--out", out.string(), "train"}).code, 0);
  ASSERT_EQ(run({"--config", cfg, "--out", out.string(), "evaluate"}).code, 0);
  const auto r = run({"--config", cfg, "--out", out.string(), "report-alpha"});
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(read_file(out / kAlphaFile));
  EXPECT_EQ(j["alpha"].size(), 5u);
  EXPECT_NEAR(j["sum"].get<double>(), 1.0, 1e-9);
}

TEST(RunConfig, DefaultsAndOverrides) {
  const RunConfig c = parse_run_config("# comment\nseed=12\nmodel.activation=tanh\nsplit.mode=none\n");
  EXPECT_EQ(c.seed, 12u);
  EXPECT_EQ(c.train.seed, 12u);
  EXPECT_EQ(c.model.activation, Activation::kTanh);
  EXPECT_FALSE(c.split_mode.has_value());
  const RunConfig again = parse_run_config(resolved_config_text(c));
  EXPECT_EQ(resolved_config_text(again), resolved_config_text(c));
  EXPECT_THROW(parse_run_config("seed=1\nseed=2\n"), Error);
  EXPECT_THROW(parse_run_config("model.dropout=1.5\n").validate(false), Error);
}

}  // namespace
}  // namespace diadem::cli
