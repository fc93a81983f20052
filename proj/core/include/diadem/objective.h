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

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "diadem/network.h"

namespace diadem {

/// Probabilities are floored here before every log.
inline constexpr double kProbabilityFloor = 1e-12;

struct LossWeights {
  double gamma_i = 1.0;
  double gamma_a = 0.5;
  double lambda_dis = 0.1;
  double l1 = 0.0;
  double l2 = 0.0;

  /// Throws Error(kConfigError) on negative or non-finite weights.
  void validate() const;
};

/// Supervision for one (item, annotator) sample.
struct SampleTarget {
  int gold = 0;
  /// The annotator's normalized train-split label histogram.
  Eigen::VectorXd behavior;
  /// Item group id; samples of one item share it.
  std::size_t group = 0;
};

struct LossBreakdown {
  double aggregate_nll = 0.0;  // L_y
  double annotator_kl = 0.0;   // L_yi
  double behavior_kl = 0.0;    // L_ya
  double disagreement = 0.0;   // L_dis, exact argmax form
  double regularization = 0.0;
  double total = 0.0;
};

enum class DisagreementMode {
  /// Argmax variance gap. Piecewise constant, so it carries no gradient.
  kExact,
  /// Same gap on the expected class index sum_k k p_k, differentiable.
  kSurrogate,
};

/// -log p[gold] with p floored.
double nll_aggregate(const Eigen::VectorXd& p, int gold);

/// KL(target || p) with 0 log 0 = 0 and p floored.
double kl_divergence(const Eigen::VectorXd& target, const Eigen::VectorXd& p);

/// L_yi for one sample: target is the one-hot of the annotator's label.
double kl_per_annotator(const Eigen::VectorXd& target, const Eigen::VectorXd& p_annotator);

/// L_ya for one sample: target is the annotator's behavior distribution.
double kl_annotator_behavior(const Eigen::VectorXd& target, const Eigen::VectorXd& p_behavior);

Eigen::VectorXd one_hot(int label, std::size_t num_classes);

double population_variance(std::span<const double> values);

/// Mean over item groups with >= 2 samples of |Var(golds) - Var(argmax preds)|
/// using population variance over raw class indices. 0 when no group qualifies.
double disagreement_loss(std::span<const Eigen::VectorXd> preds, std::span<const int> golds,
                         std::span<const std::size_t> groups);

/// As disagreement_loss, but the predicted side uses the expected class index.
double disagreement_surrogate(std::span<const Eigen::VectorXd> preds, std::span<const int> golds,
                              std::span<const std::size_t> groups);

/// l1 * sum|w| + l2 * sum w^2 over every tensor except alpha_logits.
double regularization(const ModelParams& params, const LossWeights& weights);

/// Every component with the exact disagreement term.
LossBreakdown total_loss(std::span<const ForwardTrace> traces, std::span<const SampleTarget> targets,
                         const ModelParams& params, const LossWeights& weights);

/// The scalar that training minimizes: total_loss with L_dis taken in `mode`.
double training_objective(std::span<const ForwardTrace> traces,
                          std::span<const SampleTarget> targets, const ModelParams& params,
                          const LossWeights& weights, DisagreementMode mode);

/// d training_objective / d logits for every sample and head, excluding the
/// regularizer (which acts on parameters directly).
std::vector<std::array<Eigen::VectorXd, kNumHeads>> logit_gradients(
    std::span<const ForwardTrace> traces, std::span<const SampleTarget> targets,
    const LossWeights& weights, DisagreementMode mode);

}  // namespace diadem
