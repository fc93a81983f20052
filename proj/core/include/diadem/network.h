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
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "diadem/dataset.h"
#include "diadem/rng.h"

namespace diadem {

enum class Activation { kRelu, kSoftsign, kTanh, kElu };
enum class Fusion { kConcat, kSum };

std::string_view to_string(Activation activation);
std::string_view to_string(Fusion fusion);
Activation activation_from_string(std::string_view name);
Fusion fusion_from_string(std::string_view name);

Eigen::VectorXd activate(Activation activation, const Eigen::VectorXd& pre);
/// Elementwise derivative at the pre-activation. relu'(0) is taken as 0.
Eigen::VectorXd activate_derivative(Activation activation, const Eigen::VectorXd& pre);

/// Max-subtracted softmax.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(const Eigen::VectorXd& values);

struct ModelConfig {
  std::size_t annotator_dim = 16;    // d_a
  std::size_t item_dim = 16;         // d_I
  std::size_t interaction_dim = 16;  // d_int
  std::size_t transform_dim = 0;     // d_P; 0 resolves to item_dim
  std::size_t num_classes = 2;       // K
  std::size_t num_axes = 1;          // D
  std::size_t feature_dim = 1;       // J
  Activation activation = Activation::kRelu;
  Fusion fusion = Fusion::kConcat;
  double dropout_rate = 0.0;
  std::size_t num_annotators = 0;

  std::size_t resolved_transform_dim() const {
    return transform_dim == 0 ? item_dim : transform_dim;
  }
  /// d_I + d_a + 2 d_int for concat fusion, d_I for sum fusion.
  std::size_t combined_dim() const;

  /// Throws Error(kFusionShapeError) for sum fusion with d_a != d_I and
  /// Error(kConfigError) for zero dims or an out-of-range dropout rate.
  void validate() const;
};

/// Every learnable tensor. Matrices follow the row/column convention of the
/// operations below; `demographic[d]` has one row per category plus UNK.
struct ModelParams {
  std::vector<Eigen::MatrixXd> demographic;  // |cat_d|+1 x d_a
  Eigen::VectorXd alpha_logits;              // D
  Eigen::MatrixXd item_proj;                 // d_I x J
  Eigen::MatrixXd interaction;               // (d_I + d_a) x d_int
  Eigen::MatrixXd hadamard_item;             // d_I x d_int
  Eigen::MatrixXd hadamard_annotator;        // d_a x d_int
  Eigen::MatrixXd fusion_proj;               // 2 d_int x d_I (sum fusion only)
  Eigen::MatrixXd transform;                 // d_P x d_combined
  Eigen::MatrixXd residual;                  // d_P x d_P
  Eigen::MatrixXd head_aggregate;            // K x d_P
  Eigen::MatrixXd head_annotator;            // K x d_P
  Eigen::MatrixXd head_annotator_direct;     // K x d_a
  Eigen::MatrixXd head_behavior;             // K x d_P

  /// Visits every tensor in a fixed order as f(name, tensor). Tensors are
  /// Eigen::MatrixXd except alpha_logits (Eigen::VectorXd).
  template <class F>
  void for_each(F&& f) {
    visit(*this, f);
  }
  template <class F>
  void for_each(F&& f) const {
    visit(*this, f);
  }

  /// Same shapes, all zeros.
  ModelParams zeros_like() const;
  std::size_t num_parameters() const;
  bool all_finite() const;

  /// Throws Error(kDimensionMismatch) unless every shape matches.
  void check_shapes(const ModelConfig& config, const DemographicSchema& schema) const;

 private:
  template <class Self, class F>
  static void visit(Self& self, F& f) {
    for (std::size_t d = 0; d < self.demographic.size(); ++d) {
      f("demographic." + std::to_string(d), self.demographic[d]);
    }
    f(std::string("alpha_logits"), self.alpha_logits);
    f(std::string("item_proj"), self.item_proj);
    f(std::string("interaction"), self.interaction);
    f(std::string("hadamard_item"), self.hadamard_item);
    f(std::string("hadamard_annotator"), self.hadamard_annotator);
    f(std::string("fusion_proj"), self.fusion_proj);
    f(std::string("transform"), self.transform);
    f(std::string("residual"), self.residual);
    f(std::string("head_aggregate"), self.head_aggregate);
    f(std::string("head_annotator"), self.head_annotator);
    f(std::string("head_annotator_direct"), self.head_annotator_direct);
    f(std::string("head_behavior"), self.head_behavior);
  }
};

/// Gradients share the parameter layout.
using Gradients = ModelParams;

/// Glorot-uniform matrices, zero alpha logits (uniform alpha).
ModelParams init_params(const ModelConfig& config, const DemographicSchema& schema, Rng& rng);

enum Head : std::size_t { kAggregateHead = 0, kAnnotatorHead = 1, kBehaviorHead = 2 };
inline constexpr std::size_t kNumHeads = 3;

struct InteractionFeatures {
  Eigen::VectorXd concat_pre;     // W_int^T [z_I; z_a]
  Eigen::VectorXd hadamard_item_pre;
  Eigen::VectorXd hadamard_annotator_pre;
  Eigen::VectorXd concat;         // z_int
  Eigen::VectorXd hadamard;       // z_had
  Eigen::VectorXd joined;         // [z_int; z_had]
};

struct TransformOutput {
  Eigen::VectorXd projected_pre;  // W_P z_combined
  Eigen::VectorXd projected;      // phi(.) after dropout
  Eigen::VectorXd dropout_mask;   // empty in eval mode
  Eigen::VectorXd encoded_pre;    // W_E z_P + z_P
  Eigen::VectorXd encoded;        // z_E
};

struct HeadOutputs {
  std::array<Eigen::VectorXd, kNumHeads> logits;
  std::array<Eigen::VectorXd, kNumHeads> probs;
};

/// All intermediates of one (item, annotator) pass.
struct ForwardTrace {
  Eigen::VectorXd alpha;
  std::vector<std::size_t> categories;  // the profile's row per axis
  Eigen::VectorXd features;             // x
  Eigen::VectorXd annotator;            // z_a
  Eigen::VectorXd item;                 // z_I
  InteractionFeatures interaction;
  Eigen::VectorXd fusion_pre;           // W_proj^T z_interaction (sum fusion)
  Eigen::VectorXd combined;
  TransformOutput transform;
  HeadOutputs heads;

  const Eigen::VectorXd& probs(Head head) const { return heads.probs[head]; }
};

Eigen::VectorXd demographic_weights(const Eigen::VectorXd& alpha_logits);

Eigen::VectorXd encode_annotator(const AnnotatorProfile& profile, const ModelParams& params);

Eigen::VectorXd encode_item(const Eigen::VectorXd& features, const ModelParams& params);

InteractionFeatures interaction_features(const Eigen::VectorXd& item, const Eigen::VectorXd& annotator,
                                         const ModelParams& params, const ModelConfig& config);

/// Concat: [z_I; z_a; z_interaction]. Sum: z_I + z_a + phi(W_proj^T z_interaction);
/// `fusion_pre` (optional) receives the projection pre-activation.
Eigen::VectorXd fuse(const Eigen::VectorXd& item, const Eigen::VectorXd& annotator,
                     const Eigen::VectorXd& interaction, const ModelParams& params,
                     const ModelConfig& config, Eigen::VectorXd* fusion_pre = nullptr);

/// Residual transform; inverted dropout on z_P in training mode only. The rng
/// is not touched when training is false or the dropout rate is 0.
TransformOutput transform(const Eigen::VectorXd& combined, const ModelParams& params,
                          const ModelConfig& config, bool training, Rng* rng);

HeadOutputs decode(const Eigen::VectorXd& encoded, const Eigen::VectorXd& annotator,
                   const ModelParams& params);

ForwardTrace forward(const Item& item, const AnnotatorProfile& profile, const ModelParams& params,
                     const ModelConfig& config, bool training, Rng* rng);

/// Training-mode forward that reuses a recorded dropout mask (empty mask
/// means no dropout), so a pass can be replayed deterministically.
ForwardTrace forward_with_mask(const Item& item, const AnnotatorProfile& profile,
                               const ModelParams& params, const ModelConfig& config,
                               const Eigen::VectorXd& mask);

}  // namespace diadem
