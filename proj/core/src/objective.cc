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

#include "diadem/objective.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "diadem/error.h"

namespace diadem {

namespace {

using Eigen::Index;
using Eigen::VectorXd;

double floored_log(double p) { return std::log(std::max(p, kProbabilityFloor)); }

std::map<std::size_t, std::vector<std::size_t>> group_members(std::span<const std::size_t> groups) {
  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t s = 0; s < groups.size(); ++s) members[groups[s]].push_back(s);
  return members;
}

void check_aligned(std::size_t a, std::size_t b, std::size_t c) {
  if (a != b || a != c) {
    throw Error(ErrorCode::kLengthMismatch, "per-sample inputs have different lengths");
  }
}

double expected_index(const VectorXd& p) {
  double e = 0.0;
  for (Index k = 0; k < p.size(); ++k) e += static_cast<double>(k) * p[k];
  return e;
}

// Shared by the exact and surrogate forms; `predicted` maps a probability
// vector to the number whose variance is compared.
template <class Predicted>
double variance_gap(std::span<const VectorXd> preds, std::span<const int> golds,
                    std::span<const std::size_t> groups, Predicted predicted) {
  check_aligned(preds.size(), golds.size(), groups.size());
  double sum = 0.0;
  std::size_t contributing = 0;
  std::vector<double> actual;
  std::vector<double> guessed;
  for (const auto& [group, members] : group_members(groups)) {
    if (members.size() < 2) continue;
    actual.clear();
    guessed.clear();
    for (const std::size_t s : members) {
      actual.push_back(static_cast<double>(golds[s]));
      guessed.push_back(predicted(preds[s]));
    }
    sum += std::abs(population_variance(actual) - population_variance(guessed));
    ++contributing;
  }
  return contributing == 0 ? 0.0 : sum / static_cast<double>(contributing);
}

LossBreakdown breakdown(std::span<const ForwardTrace> traces, std::span<const SampleTarget> targets,
                        const ModelParams& params, const LossWeights& weights,
                        DisagreementMode mode) {
  if (traces.size() != targets.size()) {
    throw Error(ErrorCode::kLengthMismatch, "traces and targets are not aligned");
  }
  if (traces.empty()) throw Error(ErrorCode::kEmptyInput, "empty batch");
  const std::size_t n = traces.size();
  const std::size_t K = static_cast<std::size_t>(traces.front().probs(kAggregateHead).size());

  LossBreakdown loss;
  std::vector<VectorXd> preds;
  std::vector<int> golds;
  std::vector<std::size_t> groups;
  preds.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const auto& t = traces[s];
    const auto& target = targets[s];
    loss.aggregate_nll += nll_aggregate(t.probs(kAggregateHead), target.gold);
    loss.annotator_kl += kl_per_annotator(one_hot(target.gold, K), t.probs(kAnnotatorHead));
    loss.behavior_kl += kl_annotator_behavior(target.behavior, t.probs(kBehaviorHead));
    preds.push_back(t.probs(kAnnotatorHead));
    golds.push_back(target.gold);
    groups.push_back(target.group);
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  loss.aggregate_nll *= inv_n;
  loss.annotator_kl *= inv_n;
  loss.behavior_kl *= inv_n;
  loss.disagreement = mode == DisagreementMode::kExact
                          ? disagreement_loss(preds, golds, groups)
                          : disagreement_surrogate(preds, golds, groups);
  loss.regularization = regularization(params, weights);
  loss.total = loss.aggregate_nll + weights.gamma_i * loss.annotator_kl +
               weights.gamma_a * loss.behavior_kl + weights.lambda_dis * loss.disagreement +
               loss.regularization;
  return loss;
}

}  // namespace

void LossWeights::validate() const {
  for (const double w : {gamma_i, gamma_a, lambda_dis, l1, l2}) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorCode::kConfigError, "loss weights must be finite and non-negative");
    }
  }
}

double nll_aggregate(const VectorXd& p, int gold) {
  if (gold < 0 || gold >= p.size()) {
    throw Error(ErrorCode::kLabelOutOfRange, "gold label " + std::to_string(gold) +
                                                 " outside [0, " + std::to_string(p.size()) + ")");
  }
  return -floored_log(p[gold]);
}

double kl_divergence(const VectorXd& target, const VectorXd& p) {
  if (target.size() != p.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "KL operands differ in length");
  }
  double kl = 0.0;
  for (Index k = 0; k < p.size(); ++k) {
    if (target[k] > 0.0) kl += target[k] * (std::log(target[k]) - floored_log(p[k]));
  }
  // Rounding can leave a -1e-17 residue when target == p.
  return std::max(kl, 0.0);
}

double kl_per_annotator(const VectorXd& target, const VectorXd& p_annotator) {
  return kl_divergence(target, p_annotator);
}

double kl_annotator_behavior(const VectorXd& target, const VectorXd& p_behavior) {
  return kl_divergence(target, p_behavior);
}

VectorXd one_hot(int label, std::size_t num_classes) {
  if (label < 0 || static_cast<std::size_t>(label) >= num_classes) {
    throw Error(ErrorCode::kLabelOutOfRange, "label " + std::to_string(label) + " out of range");
  }
  VectorXd v = VectorXd::Zero(static_cast<Index>(num_classes));
  v[label] = 1.0;
  return v;
}

double population_variance(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (const double v : values) var += (v - mean) * (v - mean);
  return var / static_cast<double>(values.size());
}

double disagreement_loss(std::span<const VectorXd> preds, std::span<const int> golds,
                         std::span<const std::size_t> groups) {
  return variance_gap(preds, golds, groups,
                      [](const VectorXd& p) { return static_cast<double>(argmax(p)); });
}

double disagreement_surrogate(std::span<const VectorXd> preds, std::span<const int> golds,
                              std::span<const std::size_t> groups) {
  return variance_gap(preds, golds, groups, expected_index);
}

double regularization(const ModelParams& params, const LossWeights& weights) {
  if (weights.l1 == 0.0 && weights.l2 == 0.0) return 0.0;
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  params.for_each([&](const std::string& name, const auto& tensor) {
    if (name == "alpha_logits") return;
    abs_sum += tensor.cwiseAbs().sum();
    sq_sum += tensor.squaredNorm();
  });
  return weights.l1 * abs_sum + weights.l2 * sq_sum;
}

LossBreakdown total_loss(std::span<const ForwardTrace> traces, std::span<const SampleTarget> targets,
                         const ModelParams& params, const LossWeights& weights) {
  return breakdown(traces, targets, params, weights, DisagreementMode::kExact);
}

double training_objective(std::span<const ForwardTrace> traces,
                          std::span<const SampleTarget> targets, const ModelParams& params,
                          const LossWeights& weights, DisagreementMode mode) {
  return breakdown(traces, targets, params, weights, mode).total;
}

std::vector<std::array<VectorXd, kNumHeads>> logit_gradients(
    std::span<const ForwardTrace> traces, std::span<const SampleTarget> targets,
    const LossWeights& weights, DisagreementMode mode) {
  if (traces.size() != targets.size()) {
    throw Error(ErrorCode::kTraceMismatch, "traces and targets are not aligned");
  }
  const std::size_t n = traces.size();
  const double inv_n = n == 0 ? 0.0 : 1.0 / static_cast<double>(n);
  std::vector<std::array<VectorXd, kNumHeads>> grads(n);

  for (std::size_t s = 0; s < n; ++s) {
    const auto& t = traces[s];
    const int gold = targets[s].gold;
    const VectorXd& p_y = t.probs(kAggregateHead);
    const VectorXd& p_i = t.probs(kAnnotatorHead);
    const VectorXd& p_a = t.probs(kBehaviorHead);

    // Cross-entropy through a floored log: no gradient once p[gold] < floor.
    grads[s][kAggregateHead] = VectorXd::Zero(p_y.size());
    if (p_y[gold] >= kProbabilityFloor) {
      grads[s][kAggregateHead] = p_y * inv_n;
      grads[s][kAggregateHead][gold] -= inv_n;
    }
    grads[s][kAnnotatorHead] = VectorXd::Zero(p_i.size());
    if (weights.gamma_i != 0.0 && p_i[gold] >= kProbabilityFloor) {
      grads[s][kAnnotatorHead] = p_i * (weights.gamma_i * inv_n);
      grads[s][kAnnotatorHead][gold] -= weights.gamma_i * inv_n;
    }
    // KL(t || p): (sum of active target mass) p - t_active.
    grads[s][kBehaviorHead] = VectorXd::Zero(p_a.size());
    if (weights.gamma_a != 0.0) {
      const VectorXd& target = targets[s].behavior;
      double mass = 0.0;
      VectorXd active = VectorXd::Zero(p_a.size());
      for (Index k = 0; k < p_a.size(); ++k) {
        if (target[k] > 0.0 && p_a[k] >= kProbabilityFloor) {
          mass += target[k];
          active[k] = target[k];
        }
      }
      grads[s][kBehaviorHead] = (mass * p_a - active) * (weights.gamma_a * inv_n);
    }
  }

  if (mode == DisagreementMode::kSurrogate && weights.lambda_dis != 0.0) {
    std::vector<std::size_t> groups(n);
    for (std::size_t s = 0; s < n; ++s) groups[s] = targets[s].group;
    const auto members = group_members(groups);
    std::size_t contributing = 0;
    for (const auto& [group, samples] : members) contributing += samples.size() >= 2 ? 1 : 0;

    std::vector<double> golds;
    std::vector<double> expected;
    for (const auto& [group, samples] : members) {
      if (samples.size() < 2) continue;
      golds.clear();
      expected.clear();
      for (const std::size_t s : samples) {
        golds.push_back(static_cast<double>(targets[s].gold));
        expected.push_back(expected_index(traces[s].probs(kAnnotatorHead)));
      }
      const double gap = population_variance(expected) - population_variance(golds);
      if (gap == 0.0) continue;  // |x| has zero subgradient at 0
      const double sign = gap > 0.0 ? 1.0 : -1.0;
      const double size = static_cast<double>(samples.size());
      double mean = 0.0;
      for (const double e : expected) mean += e;
      mean /= size;
      const double scale = weights.lambda_dis / static_cast<double>(contributing);
      for (std::size_t j = 0; j < samples.size(); ++j) {
        const VectorXd& p = traces[samples[j]].probs(kAnnotatorHead);
        const double d_expected = scale * sign * 2.0 / size * (expected[j] - mean);
        for (Index k = 0; k < p.size(); ++k) {
          grads[samples[j]][kAnnotatorHead][k] +=
              d_expected * p[k] * (static_cast<double>(k) - expected[j]);
        }
      }
    }
  }
  return grads;
}

}  // namespace diadem
