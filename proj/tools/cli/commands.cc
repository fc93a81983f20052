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

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "diadem/checkpoint.h"
#include "diadem/error.h"
#include "diadem/report.h"

namespace diadem::cli {

namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::kIoError, "cannot create output directory " + dir.string());
  }
}

// Precomputed vectors carry their own width; features.dim only sizes the hash.
FeatureSpec effective_features(const RunConfig& config) {
  FeatureSpec spec = config.features;
  if (spec.mode == FeatureMode::kPrecomputed) spec.dim = 0;
  return spec;
}

Corpus load_for_run(const RunConfig& config, std::size_t num_classes) {
  return load_corpus(config.items, config.annotators, config.annotations, LoadOptions{num_classes});
}

}  // namespace

TrainReport cmd_train(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  config.validate(/*need_data=*/true);
  ensure_dir(out_dir);

  const Corpus corpus = featurize_items(load_for_run(config, config.num_classes), effective_features(config));
  Corpus train_view = corpus;
  if (config.split_mode) train_view = split_corpus(corpus, config.split_spec()).train;

  ModelConfig model = config.model;
  model.num_classes = corpus.num_classes;
  model.num_axes = corpus.schema.size();
  model.feature_dim = corpus.feature_dim();
  model.num_annotators = train_view.annotators.size();

  log << "training on " << train_view.annotations.size() << " annotations ("
      << train_view.items.size() << " items, " << train_view.annotators.size()
      << " annotators, K=" << model.num_classes << ", D=" << model.num_axes
      << ", J=" << model.feature_dim << ")\n";
  const TrainReport report = train(train_view, config.train, model);

  FeatureSpec features = effective_features(config);
  features.dim = model.feature_dim;
  write_checkpoint(out_dir / kCheckpointFile, Checkpoint{model, corpus.schema, features, report.params});
  write_text(out_dir / kTrainReportFile, train_report_jsonl(report));
  write_text(out_dir / kResolvedConfigFile, resolved_config_text(config));

  if (!report.epochs.empty()) {
    const auto& last = report.epochs.back();
    log << "epochs=" << report.epochs.size() << " final total=" << last.loss.total
        << " L_y=" << last.loss.aggregate_nll << " L_dis=" << last.loss.disagreement << "\n";
  }
  if (report.grad_check) {
    log << "gradient check: max relative error " << report.grad_check->max_relative_error
        << " (" << report.grad_check->worst_tensor << ")\n";
  }
  log << "wall-clock " << report.wall_seconds << " s; wrote " << (out_dir / kCheckpointFile).string()
      << "\n";
  return report;
}

EvalReport cmd_evaluate(const RunConfig& config, const fs::path& checkpoint_path, EvalView view,
                        const fs::path& out_dir, std::ostream& log) {
  config.validate(/*need_data=*/true);
  const Checkpoint checkpoint = read_checkpoint(checkpoint_path);
  ensure_dir(out_dir);

  Corpus corpus = load_for_run(config, 0);
  if (schema_hash(corpus.schema) != schema_hash(checkpoint.schema)) {
    throw Error(ErrorCode::kSchemaMismatch,
                "data axes do not match the checkpoint schema hash " + schema_hash(checkpoint.schema));
  }
  if (corpus.num_classes > checkpoint.model.num_classes) {
    throw Error(ErrorCode::kLabelOutOfRange,
                "data has labels up to " + std::to_string(corpus.num_classes - 1) +
                    " but the checkpoint predicts " + std::to_string(checkpoint.model.num_classes) +
                    " classes");
  }
  corpus.num_classes = checkpoint.model.num_classes;
  corpus = featurize_items(align_to_schema(corpus, checkpoint.schema), checkpoint.features);
  if (corpus.feature_dim() != checkpoint.model.feature_dim) {
    throw Error(ErrorCode::kSchemaMismatch, "item features do not match the checkpoint width");
  }

  Corpus scored = corpus;
  if (config.split_mode && view != EvalView::kAll) {
    auto split = split_corpus(corpus, config.split_spec());
    scored = view == EvalView::kTest ? std::move(split.test) : std::move(split.train);
  }
  const Evaluation evaluation = evaluate(scored, checkpoint.params, checkpoint.model, config.eval);

  write_text(out_dir / kEvalJsonFile, eval_report_json(evaluation.report));
  write_text(out_dir / kEvalTableFile, eval_report_table(evaluation.report));
  std::ofstream tsv(out_dir / kDisagreementFile, std::ios::binary);
  write_disagreement_tsv(tsv, evaluation.items);
  log << eval_report_table(evaluation.report);
  return evaluation.report;
}

void cmd_report_alpha(const fs::path& checkpoint_path, const fs::path& out_dir, std::ostream& log) {
  const Checkpoint checkpoint = read_checkpoint(checkpoint_path);
  const auto ranking = alpha_ranking(checkpoint.schema, checkpoint.params);
  log << alpha_table(ranking);
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_text(out_dir / kAlphaFile, alpha_json(ranking));
  }
}

void cmd_synth(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  SynthSpec spec = config.synth;
  spec.schema = make_uniform_schema(config.synth_axes, config.synth_categories);
  const Corpus corpus = synth_generate(spec);
  write_corpus(corpus, out_dir);
  log << "wrote " << corpus.items.size() << " items, " << corpus.annotators.size()
      << " annotators, " << corpus.annotations.size() << " annotations to " << out_dir.string()
      << " (planted axis " << spec.schema.axes[spec.planted_axis].name << ")\n";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"diadem: demographic-aware annotator disagreement modeling"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "Run configuration (key=value file)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Seed; overrides the config");

  auto* train_cmd = app.add_subcommand("train", "Train a model and write checkpoint.bin");
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a checkpoint and write eval.json/eval.txt");
  std::string checkpoint;
  std::string view_name = "test";
  eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint (default <out>/checkpoint.bin)");
  eval_cmd->add_option("--view", view_name, "Split side to score")
      ->check(CLI::IsMember({"test", "train", "all"}));
  auto* alpha_cmd = app.add_subcommand("report-alpha", "Print learned demographic weights");
  alpha_cmd->add_option("--checkpoint", checkpoint, "Checkpoint (default <out>/checkpoint.bin)");
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic corpus");

  std::vector<const char*> argv;
  argv.push_back("diadem");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) {
      config = load_run_config(config_path);
    } else if (train_cmd->parsed() || eval_cmd->parsed()) {
      throw Error(ErrorCode::kConfigError, "--config is required");
    }
    if (seed) config.set_seed(*seed);
    const fs::path output = out_dir.empty() ? config.output_dir : fs::path(out_dir);
    const fs::path checkpoint_path =
        checkpoint.empty() ? output / kCheckpointFile : fs::path(checkpoint);

    if (train_cmd->parsed()) {
      cmd_train(config, output, out);
    } else if (eval_cmd->parsed()) {
      const EvalView view = view_name == "train" ? EvalView::kTrain
                            : view_name == "all" ? EvalView::kAll
                                                 : EvalView::kTest;
      cmd_evaluate(config, checkpoint_path, view, output, out);
    } else if (alpha_cmd->parsed()) {
      cmd_report_alpha(checkpoint_path, out_dir.empty() ? fs::path() : output, out);
    } else if (synth_cmd->parsed()) {
      cmd_synth(config, output, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_input_error(e.code()) ? kExitInput : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace diadem::cli
