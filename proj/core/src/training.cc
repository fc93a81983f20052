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

#include "diadem/training.h"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "diadem/error.h"
#include "diadem/rng.h"

namespace diadem {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<std::span<double>> flat_views(ModelParams& params) {
  std::vector<std::span<double>> views;
  params.for_each([&](const std::string&, auto& tensor) {
    views.emplace_back(tensor.data(), static_cast<std::size_t>(tensor.size()));
  });
  return views;
}

std::vector<std::span<const double>> flat_views(const ModelParams& params) {
  std::vector<std::span<const double>> views;
  params.for_each([&](const std::string&, const auto& tensor) {
    views.emplace_back(tensor.data(), static_cast<std::size_t>(tensor.size()));
  });
  return views;
}

std::vector<std::string> tensor_names(const ModelParams& params) {
  std::vector<std::string> names;
  params.for_each([&](const std::string& name, const auto&) { names.push_back(name); });
  return names;
}

// Backpropagates one sample's logit gradients into `g`.
void backward_sample(const ForwardTrace& t, const std::array<VectorXd, kNumHeads>& d_logits,
                     const ModelParams& p, const ModelConfig& config, Gradients& g) {
  const Activation act = config.activation;
  const Index d_I = t.item.size();
  const Index d_a = t.annotator.size();
  const Index d_int = t.interaction.concat.size();
  const VectorXd& encoded = t.transform.encoded;
  const VectorXd& g_y = d_logits[kAggregateHead];
  const VectorXd& g_i = d_logits[kAnnotatorHead];
  const VectorXd& g_a = d_logits[kBehaviorHead];

  // Heads.
  g.head_aggregate.noalias() += g_y * encoded.transpose();
  g.head_annotator.noalias() += g_i * encoded.transpose();
  g.head_behavior.noalias() += g_a * encoded.transpose();
  g.head_annotator_direct.noalias() += g_i * t.annotator.transpose();
  VectorXd d_encoded = p.head_aggregate.transpose() * g_y + p.head_annotator.transpose() * g_i +
                       p.head_behavior.transpose() * g_a;
  VectorXd d_annotator = p.head_annotator_direct.transpose() * g_i;

  // Residual transform: z_E = phi(W_E z_P + z_P), z_P = mask * phi(W_P z_c).
  const VectorXd d_encoded_pre =
      d_encoded.cwiseProduct(activate_derivative(act, t.transform.encoded_pre));
  g.residual.noalias() += d_encoded_pre * t.transform.projected.transpose();
  VectorXd d_projected = p.residual.transpose() * d_encoded_pre + d_encoded_pre;
  if (t.transform.dropout_mask.size() > 0) {
    d_projected = d_projected.cwiseProduct(t.transform.dropout_mask);
  }
  const VectorXd d_projected_pre =
      d_projected.cwiseProduct(activate_derivative(act, t.transform.projected_pre));
  g.transform.noalias() += d_projected_pre * t.combined.transpose();
  const VectorXd d_combined = p.transform.transpose() * d_projected_pre;

  // Fusion.
  VectorXd d_item;
  VectorXd d_interaction;
  if (config.fusion == Fusion::kConcat) {
    d_item = d_combined.head(d_I);
    d_annotator += d_combined.segment(d_I, d_a);
    d_interaction = d_combined.tail(2 * d_int);
  } else {
    d_item = d_combined;
    d_annotator += d_combined;
    const VectorXd d_fusion_pre = d_combined.cwiseProduct(activate_derivative(act, t.fusion_pre));
    g.fusion_proj.noalias() += t.interaction.joined * d_fusion_pre.transpose();
    d_interaction = p.fusion_proj * d_fusion_pre;
  }

  // Interaction features.
  const auto& f = t.interaction;
  const VectorXd d_concat_pre =
      d_interaction.head(d_int).cwiseProduct(activate_derivative(act, f.concat_pre));
  VectorXd stacked(d_I + d_a);
  stacked << t.item, t.annotator;
  g.interaction.noalias() += stacked * d_concat_pre.transpose();
  const VectorXd d_stacked = p.interaction * d_concat_pre;
  d_item += d_stacked.head(d_I);
  d_annotator += d_stacked.tail(d_a);

  const VectorXd d_hadamard = d_interaction.tail(d_int);
  const VectorXd had_item = activate(act, f.hadamard_item_pre);
  const VectorXd had_annotator = activate(act, f.hadamard_annotator_pre);
  const VectorXd d_had_item_pre = d_hadamard.cwiseProduct(had_annotator)
                                      .cwiseProduct(activate_derivative(act, f.hadamard_item_pre));
  const VectorXd d_had_annotator_pre =
      d_hadamard.cwiseProduct(had_item)
          .cwiseProduct(activate_derivative(act, f.hadamard_annotator_pre));
  g.hadamard_item.noalias() += t.item * d_had_item_pre.transpose();
  g.hadamard_annotator.noalias() += t.annotator * d_had_annotator_pre.transpose();
  d_item += p.hadamard_item * d_had_item_pre;
  d_annotator += p.hadamard_annotator * d_had_annotator_pre;

  // Item projection.
  g.item_proj.noalias() += d_item * t.features.transpose();

  // Annotator encoder: z_a = sum_d alpha_d W_d[c_d]; alpha = softmax(logits).
  const Index D = t.alpha.size();
  VectorXd d_alpha(D);
  for (Index d = 0; d < D; ++d) {
    const auto row = static_cast<Index>(t.categories[static_cast<std::size_t>(d)]);
    auto& g_d = g.demographic[static_cast<std::size_t>(d)];
    g_d.row(row) += t.alpha[d] * d_annotator.transpose();
    d_alpha[d] = d_annotator.dot(p.demographic[static_cast<std::size_t>(d)].row(row));
  }
  g.alpha_logits += t.alpha.cwiseProduct(d_alpha - VectorXd::Constant(D, t.alpha.dot(d_alpha)));
}

void add_regularization_gradient(const ModelParams& params, const LossWeights& weights,
                                 Gradients& grads) {
  if (weights.l1 == 0.0 && weights.l2 == 0.0) return;
  const auto names = tensor_names(params);
  const auto values = flat_views(params);
  auto targets = flat_views(grads);
  for (std::size_t t = 0; t < values.size(); ++t) {
    if (names[t] == "alpha_logits") continue;
    for (std::size_t i = 0; i < values[t].size(); ++i) {
      const double w = values[t][i];
      const double sign = w > 0.0 ? 1.0 : (w < 0.0 ? -1.0 : 0.0);
      targets[t][i] += weights.l1 * sign + 2.0 * weights.l2 * w;
    }
  }
}

class Optimizer {
 public:
  Optimizer(const OptimizerConfig& config, double learning_rate, const ModelParams& params)
      : config_(config), learning_rate_(learning_rate) {
    if (config_.kind == OptimizerKind::kAdam) {
      first_ = params.zeros_like();
      second_ = params.zeros_like();
    }
  }

  void step(ModelParams& params, const Gradients& grads) {
    auto w = flat_views(params);
    const auto g = flat_views(grads);
    if (config_.kind == OptimizerKind::kSgd) {
      for (std::size_t t = 0; t < w.size(); ++t) {
        for (std::size_t i = 0; i < w[t].size(); ++i) w[t][i] -= learning_rate_ * g[t][i];
      }
      return;
    }
    ++steps_;
    const double b1 = config_.beta1;
    const double b2 = config_.beta2;
    const double correction1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
    const double correction2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
    auto m = flat_views(first_);
    auto v = flat_views(second_);
    for (std::size_t t = 0; t < w.size(); ++t) {
      for (std::size_t i = 0; i < w[t].size(); ++i) {
        m[t][i] = b1 * m[t][i] + (1.0 - b1) * g[t][i];
        v[t][i] = b2 * v[t][i] + (1.0 - b2) * g[t][i] * g[t][i];
        const double m_hat = m[t][i] / correction1;
        const double v_hat = v[t][i] / correction2;
        w[t][i] -= learning_rate_ * m_hat / (std::sqrt(v_hat) + config_.eps);
      }
    }
  }

 private:
  OptimizerConfig config_;
  double learning_rate_;
  ModelParams first_;
  ModelParams second_;
  std::size_t steps_ = 0;
};

std::string location(std::size_t epoch, std::size_t batch) {
  return "epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch);
}

}  // namespace

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

OptimizerKind optimizer_from_string(std::string_view name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  throw Error(ErrorCode::kConfigError, "unknown optimizer '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (items_per_batch == 0) throw Error(ErrorCode::kConfigError, "train.items_per_batch must be >= 1");
  if (!std::isfinite(learning_rate) || learning_rate < 0.0) {
    throw Error(ErrorCode::kConfigError, "train.learning_rate must be finite and >= 0");
  }
  if (optimizer.kind == OptimizerKind::kAdam &&
      !(optimizer.beta1 >= 0.0 && optimizer.beta1 < 1.0 && optimizer.beta2 >= 0.0 &&
        optimizer.beta2 < 1.0 && optimizer.eps > 0.0)) {
    throw Error(ErrorCode::kConfigError, "adam needs beta1, beta2 in [0,1) and eps > 0");
  }
  loss_weights.validate();
}

std::vector<Batch> make_batches(const Corpus& corpus, std::size_t items_per_batch,
                                std::uint64_t seed, std::size_t epoch) {
  if (items_per_batch == 0) throw Error(ErrorCode::kInvalidArgument, "items_per_batch must be >= 1");
  const auto by_item = corpus.annotations_by_item();
  std::vector<std::size_t> items;
  for (std::size_t m = 0; m < by_item.size(); ++m) {
    if (!by_item[m].empty()) items.push_back(m);
  }
  Rng rng(seed + kBatchSeedOffset, epoch);
  rng.shuffle(std::span<std::size_t>(items));

  std::vector<Batch> batches;
  for (std::size_t start = 0; start < items.size(); start += items_per_batch) {
    Batch batch;
    const std::size_t stop = std::min(start + items_per_batch, items.size());
    for (std::size_t i = start; i < stop; ++i) {
      for (const std::size_t a : by_item[items[i]]) {
        const Annotation& ann = corpus.annotations[a];
        batch.push_back({a, ann.item, ann.annotator, ann.label, ann.item});
      }
    }
    batches.push_back(std::move(batch));
  }
  return batches;
}

std::vector<VectorXd> behavior_distributions(const Corpus& corpus) {
  std::vector<VectorXd> out;
  for (const auto& hist : corpus.annotator_histograms()) {
    VectorXd v(static_cast<Index>(hist.size()));
    double total = 0.0;
    for (std::size_t k = 0; k < hist.size(); ++k) {
      v[static_cast<Index>(k)] = static_cast<double>(hist[k]);
      total += static_cast<double>(hist[k]);
    }
    if (total > 0.0) v /= total;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<SampleTarget> make_targets(const Batch& batch, std::span<const VectorXd> behaviors) {
  std::vector<SampleTarget> targets;
  targets.reserve(batch.size());
  for (const auto& s : batch) targets.push_back({s.label, behaviors[s.annotator], s.group});
  return targets;
}

std::vector<ForwardTrace> forward_batch(const Corpus& corpus, const Batch& batch,
                                        const ModelParams& params, const ModelConfig& config,
                                        bool training, Rng* rng) {
  std::vector<ForwardTrace> traces;
  traces.reserve(batch.size());
  for (const auto& s : batch) {
    traces.push_back(forward(corpus.items[s.item], corpus.annotators[s.annotator], params, config,
                             training, rng));
  }
  return traces;
}

Gradients backward(std::span<const ForwardTrace> traces, std::span<const SampleTarget> targets,
                   const ModelParams& params, const LossWeights& weights,
                   const ModelConfig& config, DisagreementMode mode) {
  if (traces.size() != targets.size()) {
    throw Error(ErrorCode::kTraceMismatch, "traces and targets are not aligned");
  }
  Gradients grads = params.zeros_like();
  const auto d_logits = logit_gradients(traces, targets, weights, mode);
  for (std::size_t s = 0; s < traces.size(); ++s) {
    const auto& t = traces[s];
    if (t.categories.size() != params.demographic.size() ||
        t.item.size() != params.item_proj.rows() || t.combined.size() != params.transform.cols()) {
      throw Error(ErrorCode::kTraceMismatch, "trace " + std::to_string(s) + " does not fit params");
    }
    backward_sample(t, d_logits[s], params, config, grads);
  }
  add_regularization_gradient(params, weights, grads);
  return grads;
}

Gradients finite_difference_grad(const std::function<double(const ModelParams&)>& loss_fn,
                                 const ModelParams& params, double epsilon) {
  ModelParams probe = params;
  Gradients grads = params.zeros_like();
  auto w = flat_views(probe);
  auto g = flat_views(grads);
  for (std::size_t t = 0; t < w.size(); ++t) {
    for (std::size_t i = 0; i < w[t].size(); ++i) {
      const double saved = w[t][i];
      w[t][i] = saved + epsilon;
      const double plus = loss_fn(probe);
      w[t][i] = saved - epsilon;
      const double minus = loss_fn(probe);
      w[t][i] = saved;
      g[t][i] = (plus - minus) / (2.0 * epsilon);
    }
  }
  return grads;
}

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

GradientCheck compare_gradients(const Gradients& analytic, const Gradients& numeric) {
  const auto names = tensor_names(analytic);
  const auto a = flat_views(analytic);
  const auto n = flat_views(numeric);
  if (a.size() != n.size()) throw Error(ErrorCode::kDimensionMismatch, "gradient layouts differ");
  GradientCheck check;
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (a[t].size() != n[t].size()) {
      throw Error(ErrorCode::kDimensionMismatch, "gradient shapes differ for " + names[t]);
    }
    for (std::size_t i = 0; i < a[t].size(); ++i) {
      const double err = relative_error(a[t][i], n[t][i]);
      if (check.worst_tensor.empty() || err > check.max_relative_error) {
        check.max_relative_error = err;
        check.worst_tensor = names[t];
        check.worst_index = i;
      }
    }
  }
  return check;
}

GradientCheck check_batch_gradients(const Corpus& corpus, const Batch& batch,
                                    const ModelParams& params, const ModelConfig& config,
                                    const LossWeights& weights, DisagreementMode mode,
                                    double epsilon) {
  const auto behaviors = behavior_distributions(corpus);
  const auto targets = make_targets(batch, behaviors);
  Rng rng(0x5eed, 7);
  const auto traces = forward_batch(corpus, batch, params, config, true, &rng);

  const Gradients analytic = backward(traces, targets, params, weights, config, mode);
  auto loss_fn = [&](const ModelParams& probe) {
    std::vector<ForwardTrace> replay;
    replay.reserve(batch.size());
    for (std::size_t s = 0; s < batch.size(); ++s) {
      replay.push_back(forward_with_mask(corpus.items[batch[s].item],
                                         corpus.annotators[batch[s].annotator], probe, config,
                                         traces[s].transform.dropout_mask));
    }
    return training_objective(replay, targets, probe, weights, mode);
  };
  return compare_gradients(analytic, finite_difference_grad(loss_fn, params, epsilon));
}

TrainReport train(const Corpus& train_corpus, const TrainConfig& config,
                  const ModelConfig& model_config, ModelParams initial) {
  config.validate();
  model_config.validate();
  initial.check_shapes(model_config, train_corpus.schema);
  if (train_corpus.annotations.empty()) throw Error(ErrorCode::kEmptyCorpus, "no training annotations");
  if (train_corpus.feature_dim() != model_config.feature_dim) {
    throw Error(ErrorCode::kDimensionMismatch, "corpus feature width differs from model.feature_dim");
  }

  const auto start = std::chrono::steady_clock::now();
  const DisagreementMode mode = config.disagreement_mode();
  const auto behaviors = behavior_distributions(train_corpus);
  Rng dropout_rng(config.seed, kDropoutSeedOffset);
  Optimizer optimizer(config.optimizer, config.learning_rate, initial);

  TrainReport report;
  report.params = std::move(initial);
  ModelParams& params = report.params;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto batches = make_batches(train_corpus, config.items_per_batch, config.seed, epoch);
    if (epoch == 0 && config.grad_check && !batches.empty()) {
      report.grad_check = check_batch_gradients(train_corpus, batches.front(), params,
                                                model_config, config.loss_weights, mode);
    }
    EpochRecord record;
    record.epoch = epoch;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const auto targets = make_targets(batches[b], behaviors);
      const auto traces =
          forward_batch(train_corpus, batches[b], params, model_config, true, &dropout_rng);
      const LossBreakdown loss = total_loss(traces, targets, params, config.loss_weights);
      if (!std::isfinite(loss.total)) {
        throw Error(ErrorCode::kNonFiniteLoss, "non-finite loss at " + location(epoch, b));
      }
      const Gradients grads =
          backward(traces, targets, params, config.loss_weights, model_config, mode);
      if (!grads.all_finite()) {
        throw Error(ErrorCode::kNonFiniteLoss, "non-finite gradient at " + location(epoch, b));
      }
      optimizer.step(params, grads);

      record.loss.aggregate_nll += loss.aggregate_nll;
      record.loss.annotator_kl += loss.annotator_kl;
      record.loss.behavior_kl += loss.behavior_kl;
      record.loss.disagreement += loss.disagreement;
      record.loss.regularization += loss.regularization;
      record.loss.total += loss.total;
    }
    const double inv = batches.empty() ? 0.0 : 1.0 / static_cast<double>(batches.size());
    record.loss.aggregate_nll *= inv;
    record.loss.annotator_kl *= inv;
    record.loss.behavior_kl *= inv;
    record.loss.disagreement *= inv;
    record.loss.regularization *= inv;
    record.loss.total *= inv;
    record.alpha = demographic_weights(params.alpha_logits);
    report.epochs.push_back(std::move(record));
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

TrainReport train(const Corpus& train_corpus, const TrainConfig& config,
                  const ModelConfig& model_config) {
  model_config.validate();
  Rng rng(config.seed, kInitSeedOffset);
  return train(train_corpus, config, model_config,
               init_params(model_config, train_corpus.schema, rng));
}

}  // namespace diadem
