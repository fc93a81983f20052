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

#include "diadem/network.h"

#include <cmath>

#include "diadem/error.h"

namespace diadem {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

Index idx(std::size_t n) { return static_cast<Index>(n); }

void expect_size(const VectorXd& v, Index size, const char* what) {
  if (v.size() != size) {
    throw Error(ErrorCode::kDimensionMismatch, std::string(what) + " has length " +
                                                   std::to_string(v.size()) + ", expected " +
                                                   std::to_string(size));
  }
}

void expect_shape(const MatrixXd& m, std::size_t rows, std::size_t cols, const std::string& what) {
  if (m.rows() != idx(rows) || m.cols() != idx(cols)) {
    throw Error(ErrorCode::kDimensionMismatch,
                what + " is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                    ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

}  // namespace

std::string_view to_string(Activation activation) {
  switch (activation) {
    case Activation::kRelu: return "relu";
    case Activation::kSoftsign: return "softsign";
    case Activation::kTanh: return "tanh";
    case Activation::kElu: return "elu";
  }
  return "relu";
}

std::string_view to_string(Fusion fusion) {
  return fusion == Fusion::kConcat ? "concat" : "sum";
}

Activation activation_from_string(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "softsign") return Activation::kSoftsign;
  if (name == "tanh") return Activation::kTanh;
  if (name == "elu") return Activation::kElu;
  throw Error(ErrorCode::kConfigError, "unknown activation '" + std::string(name) + "'");
}

Fusion fusion_from_string(std::string_view name) {
  if (name == "concat") return Fusion::kConcat;
  if (name == "sum") return Fusion::kSum;
  throw Error(ErrorCode::kConfigError, "unknown fusion '" + std::string(name) + "'");
}

VectorXd activate(Activation activation, const VectorXd& pre) {
  switch (activation) {
    case Activation::kRelu:
      return pre.cwiseMax(0.0);
    case Activation::kSoftsign:
      return pre.array() / (1.0 + pre.array().abs());
    case Activation::kTanh:
      return pre.array().tanh();
    case Activation::kElu:
      return pre.unaryExpr([](double x) { return x > 0.0 ? x : std::expm1(x); });
  }
  return pre;
}

VectorXd activate_derivative(Activation activation, const VectorXd& pre) {
  switch (activation) {
    case Activation::kRelu:
      return pre.unaryExpr([](double x) { return x > 0.0 ? 1.0 : 0.0; });
    case Activation::kSoftsign:
      return pre.unaryExpr([](double x) {
        const double d = 1.0 + std::abs(x);
        return 1.0 / (d * d);
      });
    case Activation::kTanh:
      return pre.unaryExpr([](double x) {
        const double t = std::tanh(x);
        return 1.0 - t * t;
      });
    case Activation::kElu:
      return pre.unaryExpr([](double x) { return x > 0.0 ? 1.0 : std::exp(x); });
  }
  return VectorXd::Ones(pre.size());
}

VectorXd softmax(const VectorXd& logits) {
  VectorXd p = (logits.array() - logits.maxCoeff()).exp();
  return p / p.sum();
}

std::size_t argmax(const VectorXd& values) {
  Index best = 0;
  for (Index k = 1; k < values.size(); ++k) {
    if (values[k] > values[best]) best = k;
  }
  return static_cast<std::size_t>(best);
}

std::size_t ModelConfig::combined_dim() const {
  return fusion == Fusion::kConcat ? item_dim + annotator_dim + 2 * interaction_dim : item_dim;
}

void ModelConfig::validate() const {
  if (annotator_dim == 0 || item_dim == 0 || interaction_dim == 0 || num_classes == 0 ||
      num_axes == 0 || feature_dim == 0) {
    throw Error(ErrorCode::kConfigError, "model dimensions must all be >= 1");
  }
  if (fusion == Fusion::kSum && annotator_dim != item_dim) {
    throw Error(ErrorCode::kFusionShapeError,
                "sum fusion requires model.d_a == model.d_I (got d_a=" +
                    std::to_string(annotator_dim) + ", d_I=" + std::to_string(item_dim) + ")");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw Error(ErrorCode::kConfigError, "model.dropout must lie in [0, 1)");
  }
}

ModelParams ModelParams::zeros_like() const {
  ModelParams zeros = *this;
  zeros.for_each([](const std::string&, auto& tensor) { tensor.setZero(); });
  return zeros;
}

std::size_t ModelParams::num_parameters() const {
  std::size_t total = 0;
  for_each([&](const std::string&, const auto& tensor) { total += static_cast<std::size_t>(tensor.size()); });
  return total;
}

bool ModelParams::all_finite() const {
  bool finite = true;
  for_each([&](const std::string&, const auto& tensor) { finite = finite && tensor.allFinite(); });
  return finite;
}

void ModelParams::check_shapes(const ModelConfig& config, const DemographicSchema& schema) const {
  const std::size_t d_a = config.annotator_dim;
  const std::size_t d_I = config.item_dim;
  const std::size_t d_int = config.interaction_dim;
  const std::size_t d_P = config.resolved_transform_dim();
  const std::size_t K = config.num_classes;
  if (demographic.size() != schema.size() || schema.size() != config.num_axes) {
    throw Error(ErrorCode::kAxisMismatch, "parameter axis count differs from schema");
  }
  for (std::size_t d = 0; d < demographic.size(); ++d) {
    expect_shape(demographic[d], schema.axes[d].num_rows(), d_a, "demographic." + std::to_string(d));
  }
  expect_size(alpha_logits, idx(config.num_axes), "alpha_logits");
  expect_shape(item_proj, d_I, config.feature_dim, "item_proj");
  expect_shape(interaction, d_I + d_a, d_int, "interaction");
  expect_shape(hadamard_item, d_I, d_int, "hadamard_item");
  expect_shape(hadamard_annotator, d_a, d_int, "hadamard_annotator");
  if (config.fusion == Fusion::kSum) {
    expect_shape(fusion_proj, 2 * d_int, d_I, "fusion_proj");
  } else {
    expect_shape(fusion_proj, 0, 0, "fusion_proj");
  }
  expect_shape(transform, d_P, config.combined_dim(), "transform");
  expect_shape(residual, d_P, d_P, "residual");
  expect_shape(head_aggregate, K, d_P, "head_aggregate");
  expect_shape(head_annotator, K, d_P, "head_annotator");
  expect_shape(head_annotator_direct, K, d_a, "head_annotator_direct");
  expect_shape(head_behavior, K, d_P, "head_behavior");
}

ModelParams init_params(const ModelConfig& config, const DemographicSchema& schema, Rng& rng) {
  config.validate();
  if (schema.size() != config.num_axes) {
    throw Error(ErrorCode::kAxisMismatch, "model.num_axes differs from the schema axis count");
  }
  const Index d_a = idx(config.annotator_dim);
  const Index d_I = idx(config.item_dim);
  const Index d_int = idx(config.interaction_dim);
  const Index d_P = idx(config.resolved_transform_dim());
  const Index K = idx(config.num_classes);

  ModelParams p;
  for (const auto& axis : schema.axes) p.demographic.emplace_back(idx(axis.num_rows()), d_a);
  p.alpha_logits = VectorXd::Zero(idx(schema.size()));
  p.item_proj.resize(d_I, idx(config.feature_dim));
  p.interaction.resize(d_I + d_a, d_int);
  p.hadamard_item.resize(d_I, d_int);
  p.hadamard_annotator.resize(d_a, d_int);
  if (config.fusion == Fusion::kSum) p.fusion_proj.resize(2 * d_int, d_I);
  p.transform.resize(d_P, idx(config.combined_dim()));
  p.residual.resize(d_P, d_P);
  p.head_aggregate.resize(K, d_P);
  p.head_annotator.resize(K, d_P);
  p.head_annotator_direct.resize(K, d_a);
  p.head_behavior.resize(K, d_P);

  p.for_each([&](const std::string& name, auto& tensor) {
    if (name == "alpha_logits") return;
    const double limit = std::sqrt(6.0 / static_cast<double>(tensor.rows() + tensor.cols()));
    // Row-major fill keeps the draw order independent of Eigen's storage.
    for (Index r = 0; r < tensor.rows(); ++r) {
      for (Index c = 0; c < tensor.cols(); ++c) tensor(r, c) = rng.uniform(-limit, limit);
    }
  });
  return p;
}

VectorXd demographic_weights(const VectorXd& alpha_logits) { return softmax(alpha_logits); }

VectorXd encode_annotator(const AnnotatorProfile& profile, const ModelParams& params) {
  if (profile.values.size() != params.demographic.size()) {
    throw Error(ErrorCode::kAxisMismatch,
                "annotator '" + profile.annotator_id + "' has " +
                    std::to_string(profile.values.size()) + " axes, model has " +
                    std::to_string(params.demographic.size()));
  }
  const VectorXd alpha = demographic_weights(params.alpha_logits);
  VectorXd z = VectorXd::Zero(params.demographic.front().cols());
  for (std::size_t d = 0; d < params.demographic.size(); ++d) {
    const Index row = idx(profile.values[d]);
    if (row >= params.demographic[d].rows()) {
      throw Error(ErrorCode::kAxisMismatch, "category index out of range on axis " + std::to_string(d));
    }
    // One-hot a_d times W_d is a row selection.
    z += alpha[idx(d)] * params.demographic[d].row(row).transpose();
  }
  return z;
}

VectorXd encode_item(const VectorXd& features, const ModelParams& params) {
  expect_size(features, params.item_proj.cols(), "item features");
  return params.item_proj * features;
}

InteractionFeatures interaction_features(const VectorXd& item, const VectorXd& annotator,
                                         const ModelParams& params, const ModelConfig& config) {
  expect_size(item, params.hadamard_item.rows(), "item embedding");
  expect_size(annotator, params.hadamard_annotator.rows(), "annotator embedding");
  InteractionFeatures f;
  VectorXd stacked(item.size() + annotator.size());
  stacked << item, annotator;
  f.concat_pre = params.interaction.transpose() * stacked;
  f.hadamard_item_pre = params.hadamard_item.transpose() * item;
  f.hadamard_annotator_pre = params.hadamard_annotator.transpose() * annotator;
  f.concat = activate(config.activation, f.concat_pre);
  f.hadamard = activate(config.activation, f.hadamard_item_pre)
                   .cwiseProduct(activate(config.activation, f.hadamard_annotator_pre));
  f.joined.resize(f.concat.size() + f.hadamard.size());
  f.joined << f.concat, f.hadamard;
  return f;
}

VectorXd fuse(const VectorXd& item, const VectorXd& annotator, const VectorXd& interaction,
              const ModelParams& params, const ModelConfig& config, VectorXd* fusion_pre) {
  if (config.fusion == Fusion::kConcat) {
    VectorXd combined(item.size() + annotator.size() + interaction.size());
    combined << item, annotator, interaction;
    return combined;
  }
  if (item.size() != annotator.size()) {
    throw Error(ErrorCode::kFusionShapeError, "sum fusion requires d_a == d_I");
  }
  expect_size(interaction, params.fusion_proj.rows(), "interaction features");
  VectorXd pre = params.fusion_proj.transpose() * interaction;
  VectorXd combined = item + annotator + activate(config.activation, pre);
  if (fusion_pre != nullptr) *fusion_pre = std::move(pre);
  return combined;
}

namespace {

TransformOutput transform_impl(const VectorXd& combined, const ModelParams& params,
                               const ModelConfig& config, const VectorXd* fixed_mask, Rng* rng) {
  expect_size(combined, params.transform.cols(), "combined representation");
  TransformOutput out;
  out.projected_pre = params.transform * combined;
  out.projected = activate(config.activation, out.projected_pre);
  if (fixed_mask != nullptr && fixed_mask->size() > 0) {
    expect_size(*fixed_mask, out.projected.size(), "dropout mask");
    out.dropout_mask = *fixed_mask;
  } else if (rng != nullptr) {
    // Inverted dropout: kept units are rescaled by 1 / keep.
    const double keep = 1.0 - config.dropout_rate;
    out.dropout_mask.resize(out.projected.size());
    for (Index i = 0; i < out.dropout_mask.size(); ++i) {
      out.dropout_mask[i] = rng->uniform() < keep ? 1.0 / keep : 0.0;
    }
  }
  if (out.dropout_mask.size() > 0) out.projected = out.projected.cwiseProduct(out.dropout_mask);
  out.encoded_pre = params.residual * out.projected + out.projected;
  out.encoded = activate(config.activation, out.encoded_pre);
  return out;
}

ForwardTrace forward_impl(const Item& item, const AnnotatorProfile& profile,
                          const ModelParams& params, const ModelConfig& config,
                          const VectorXd* fixed_mask, Rng* rng) {
  ForwardTrace t;
  t.alpha = demographic_weights(params.alpha_logits);
  t.categories = profile.values;
  t.features = item.features;
  t.annotator = encode_annotator(profile, params);
  t.item = encode_item(item.features, params);
  t.interaction = interaction_features(t.item, t.annotator, params, config);
  t.combined = fuse(t.item, t.annotator, t.interaction.joined, params, config, &t.fusion_pre);
  t.transform = transform_impl(t.combined, params, config, fixed_mask, rng);
  t.heads = decode(t.transform.encoded, t.annotator, params);
  return t;
}

}  // namespace

TransformOutput transform(const VectorXd& combined, const ModelParams& params,
                          const ModelConfig& config, bool training, Rng* rng) {
  const bool dropout = training && config.dropout_rate > 0.0;
  if (dropout && rng == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "training-mode dropout needs an rng");
  }
  return transform_impl(combined, params, config, nullptr, dropout ? rng : nullptr);
}

HeadOutputs decode(const VectorXd& encoded, const VectorXd& annotator, const ModelParams& params) {
  expect_size(encoded, params.head_aggregate.cols(), "encoded representation");
  expect_size(annotator, params.head_annotator_direct.cols(), "annotator embedding");
  HeadOutputs out;
  out.logits[kAggregateHead] = params.head_aggregate * encoded;
  out.logits[kAnnotatorHead] =
      params.head_annotator * encoded + params.head_annotator_direct * annotator;
  out.logits[kBehaviorHead] = params.head_behavior * encoded;
  for (std::size_t h = 0; h < kNumHeads; ++h) out.probs[h] = softmax(out.logits[h]);
  return out;
}

ForwardTrace forward(const Item& item, const AnnotatorProfile& profile, const ModelParams& params,
                     const ModelConfig& config, bool training, Rng* rng) {
  const bool dropout = training && config.dropout_rate > 0.0;
  if (dropout && rng == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "training-mode dropout needs an rng");
  }
  return forward_impl(item, profile, params, config, nullptr, dropout ? rng : nullptr);
}

ForwardTrace forward_with_mask(const Item& item, const AnnotatorProfile& profile,
                               const ModelParams& params, const ModelConfig& config,
                               const VectorXd& mask) {
  return forward_impl(item, profile, params, config, &mask, nullptr);
}

}  // namespace diadem
