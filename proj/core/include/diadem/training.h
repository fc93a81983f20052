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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "diadem/dataset.h"
#include "diadem/network.h"
#include "diadem/objective.h"

namespace diadem {

enum class OptimizerKind { kSgd, kAdam };

std::string_view to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(std::string_view name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct TrainConfig {
  std::size_t epochs = 20;
  std::size_t items_per_batch = 8;
  double learning_rate = 1e-3;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;
  LossWeights loss_weights;
  /// Compare analytic and finite-difference gradients on the first batch.
  bool grad_check = false;
  /// Train through the differentiable disagreement surrogate.
  bool dis_surrogate = true;

  DisagreementMode disagreement_mode() const {
    return dis_surrogate ? DisagreementMode::kSurrogate : DisagreementMode::kExact;
  }
  void validate() const;
};

/// One (item, annotator, label) sample; `group` is the item index.
struct Sample {
  std::size_t annotation = 0;
  std::size_t item = 0;
  std::size_t annotator = 0;
  int label = 0;
  std::size_t group = 0;
};

using Batch = std::vector<Sample>;

/// Shuffles items per (seed, epoch) and packs `items_per_batch` whole items
/// into each batch, so an item's annotations never straddle two batches.
/// Items without annotations are skipped.
std::vector<Batch> make_batches(const Corpus& corpus, std::size_t items_per_batch,
                                std::uint64_t seed, std::size_t epoch);

/// Normalized annotator label histograms (zero vector for annotators with no
/// labels in `corpus`).
std::vector<Eigen::VectorXd> behavior_distributions(const Corpus& corpus);

std::vector<SampleTarget> make_targets(const Batch& batch,
                                       std::span<const Eigen::VectorXd> behaviors);

/// Forward pass over a batch. Training mode draws dropout masks from `rng`.
std::vector<ForwardTrace> forward_batch(const Corpus& corpus, const Batch& batch,
                                        const ModelParams& params, const ModelConfig& config,
                                        bool training, Rng* rng);

/// Exact gradient of training_objective(traces, targets, params, weights, mode)
/// with respect to every parameter tensor.
Gradients backward(std::span<const ForwardTrace> traces, std::span<const SampleTarget> targets,
                   const ModelParams& params, const LossWeights& weights,
                   const ModelConfig& config, DisagreementMode mode);

/// Central differences (L(w+eps) - L(w-eps)) / (2 eps), one entry at a time.
Gradients finite_difference_grad(const std::function<double(const ModelParams&)>& loss_fn,
                                 const ModelParams& params, double epsilon);

/// |a - b| / max(|a|, |b|, 1e-8).
double relative_error(double a, double b);

struct GradientCheck {
  double max_relative_error = 0.0;
  std::string worst_tensor;
  std::size_t worst_index = 0;
};

/// Entry-wise comparison of two gradient sets.
GradientCheck compare_gradients(const Gradients& analytic, const Gradients& numeric);

/// Analytic vs central-difference gradients of the batch objective, with the
/// batch's dropout masks frozen.
GradientCheck check_batch_gradients(const Corpus& corpus, const Batch& batch,
                                    const ModelParams& params, const ModelConfig& config,
                                    const LossWeights& weights, DisagreementMode mode,
                                    double epsilon = 1e-5);

struct EpochRecord {
  std::size_t epoch = 0;
  /// Component-wise mean over the epoch's batches (exact disagreement form).
  LossBreakdown loss;
  Eigen::VectorXd alpha;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  ModelParams params;
  double wall_seconds = 0.0;
  std::optional<GradientCheck> grad_check;
};

/// Trains from `initial` parameters.
TrainReport train(const Corpus& train_corpus, const TrainConfig& config,
                  const ModelConfig& model_config, ModelParams initial);

/// Trains from parameters initialized with the config seed.
TrainReport train(const Corpus& train_corpus, const TrainConfig& config,
                  const ModelConfig& model_config);

}  // namespace diadem
