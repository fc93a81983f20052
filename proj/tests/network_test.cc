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

#include <gtest/gtest.h>

#include "diadem/error.h"
#include "oracles/oracles.h"
#include "test_util.h"

namespace diadem {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using testing::vec;

MatrixXd mat(Eigen::Index rows, Eigen::Index cols, std::initializer_list<double> values) {
  MatrixXd m(rows, cols);
  auto it = values.begin();
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = *it++;
  }
  return m;
}

void expect_vec(const VectorXd& actual, std::initializer_list<double> expected, double tol = 1e-12) {
  ASSERT_EQ(actual.size(), static_cast<Eigen::Index>(expected.size()));
  Eigen::Index i = 0;
  for (double e : expected) {
    EXPECT_NEAR(actual(i), e, tol) << "index " << i;
    ++i;
  }
}

TEST(DemographicWeights, UniformUnderEqualLogits) {
  expect_vec(demographic_weights(VectorXd::Zero(5)), {0.2, 0.2, 0.2, 0.2, 0.2});
}

TEST(DemographicWeights, ShiftInvariant) {
  const VectorXd raw = vec({0.3, -1.2, 2.0});
  EXPECT_TRUE(demographic_weights(raw).isApprox(demographic_weights(raw.array() + 7.5), 1e-12));
}

TEST(DemographicWeights, LnTwoGivesTwoThirds) {
  expect_vec(demographic_weights(vec({std::log(2.0), 0.0})), {2.0 / 3.0, 1.0 / 3.0});
}

TEST(DemographicWeights, LargeLogitsStayFinite) {
  const VectorXd a = demographic_weights(vec({1000.0, 999.0, -1000.0}));
  EXPECT_TRUE(a.allFinite());
  EXPECT_NEAR(a.sum(), 1.0, 1e-12);
}

ModelParams annotator_params(std::vector<MatrixXd> tables, VectorXd alpha) {
  ModelParams p;
  p.demographic = std::move(tables);
  p.alpha_logits = std::move(alpha);
  return p;
}

TEST(EncodeAnnotator, SingleAxisSelectsRow) {
  const auto p = annotator_params({mat(3, 2, {1, 2, 3, 4, 5, 6})}, vec({0.7}));
  expect_vec(encode_annotator({"a", {1}}, p), {3, 4});
}

TEST(EncodeAnnotator, ZeroTablesGiveZero) {
  const auto p = annotator_params({MatrixXd::Zero(3, 2), MatrixXd::Zero(2, 2)}, vec({0.1, 3.0}));
  expect_vec(encode_annotator({"a", {2, 0}}, p), {0, 0});
}

TEST(EncodeAnnotator, TwoAxesEqualWeights) {
  // Row 1 of W_1 = [2, 0, -4], row 0 of W_2 = [6, 2, 2]; z_a = 0.5 row + 0.5 row.
  const auto p = annotator_params({mat(3, 3, {1, 1, 1, 2, 0, -4, 0, 0, 0}),
                                   mat(2, 3, {6, 2, 2, 9, 9, 9})},
                                  vec({0.0, 0.0}));
  expect_vec(encode_annotator({"a", {1, 0}}, p), {4, 1, -1});
}

TEST(EncodeAnnotator, AxisMismatch) {
  const auto p = annotator_params({MatrixXd::Zero(3, 2)}, vec({0.0}));
  EXPECT_THROW(encode_annotator({"a", {0, 1}}, p), Error);
  EXPECT_THROW(encode_annotator({"a", {3}}, p), Error);
}

TEST(EncodeItem, IdentityZeroAndHandFixture) {
  ModelParams p;
  p.item_proj = MatrixXd::Identity(3, 3);
  expect_vec(encode_item(vec({1, -2, 3}), p), {1, -2, 3});
  expect_vec(encode_item(VectorXd::Zero(3), p), {0, 0, 0});
  p.item_proj = mat(2, 3, {1, 2, 3, 4, 5, 6});
  expect_vec(encode_item(vec({1, 0, 1}), p), {4, 10});
  EXPECT_THROW(encode_item(vec({1, 0}), p), Error);
}

ModelParams interaction_params() {
  ModelParams p;
  p.interaction = mat(4, 2, {1, 0, 0, 1, 1, 1, -1, 2});
  p.hadamard_item = mat(2, 2, {1, -1, 2, 0});
  p.hadamard_annotator = mat(2, 2, {2, 1, 1, 3});
  return p;
}

TEST(Interaction, HandFixture) {
  // W_int^T [1,2,1,-1] = [3,1]; W_had_I^T [1,2] = [5,-1]; W_had_a^T [1,-1] = [1,-2].
  const auto f = interaction_features(vec({1, 2}), vec({1, -1}), interaction_params(),
                                      testing::tiny_config());
  expect_vec(f.concat, {3, 1});
  expect_vec(f.hadamard, {5, 0});
  expect_vec(f.joined, {3, 1, 5, 0});
}

TEST(Interaction, ZeroAnnotatorAbsorbsHadamard) {
  const auto p = interaction_params();
  for (auto act : {Activation::kRelu, Activation::kSoftsign, Activation::kTanh, Activation::kElu}) {
    const auto f = interaction_features(vec({1, 2}), VectorXd::Zero(2), p,
                                        testing::tiny_config(Fusion::kConcat, act));
    expect_vec(f.hadamard, {0, 0});
  }
  const auto f = interaction_features(vec({1, 2}), VectorXd::Zero(2), p, testing::tiny_config());
  expect_vec(f.concat, {1, 2});  // relu(W_int^T [1,2,0,0])
}

TEST(Interaction, ReluKillsNegativePreActivations) {
  ModelParams p;
  p.interaction = -MatrixXd::Ones(4, 2);
  p.hadamard_item = -MatrixXd::Ones(2, 2);
  p.hadamard_annotator = -MatrixXd::Ones(2, 2);
  const auto f = interaction_features(vec({1, 2}), vec({3, 1}), p, testing::tiny_config());
  expect_vec(f.joined, {0, 0, 0, 0});
}

TEST(Fuse, ConcatLength) {
  auto config = testing::tiny_config();
  config.annotator_dim = 3;
  config.interaction_dim = 4;
  const auto out = fuse(VectorXd::Ones(2), VectorXd::Ones(3), VectorXd::Ones(8), {}, config);
  EXPECT_EQ(out.size(), 2 + 3 + 2 * 4);
  EXPECT_EQ(static_cast<std::size_t>(out.size()), config.combined_dim());
}

TEST(Fuse, SumModeIdentityAndHandFixture) {
  const auto config = testing::tiny_config(Fusion::kSum);
  ModelParams p;
  p.fusion_proj = mat(4, 2, {1, 0, 0, 1, 1, -1, 0, 2});
  expect_vec(fuse(vec({1, 2}), vec({3, -1}), VectorXd::Zero(4), p, config), {4, 1});
  // W_proj^T [1,0,2,1] = [3,0]; [1,2] + [3,-1] + [3,0] = [7,1].
  expect_vec(fuse(vec({1, 2}), vec({3, -1}), vec({1, 0, 2, 1}), p, config), {7, 1});
}

TEST(Fuse, SumModeShapeError) {
  auto config = testing::tiny_config(Fusion::kSum);
  config.annotator_dim = 3;
  try {
    config.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFusionShapeError);
  }
  ModelParams p;
  p.fusion_proj = MatrixXd::Zero(4, 2);
  EXPECT_THROW(fuse(vec({1, 2}), vec({1, 2, 3}), VectorXd::Zero(4), p, config), Error);
}

TEST(Transform, HandFixture) {
  auto config = testing::tiny_config();
  ModelParams p;
  p.transform = mat(3, 3, {1, 0, 1, 0, 2, 0, -1, 1, 1});
  p.residual = mat(3, 3, {0, 1, 0, 1, 0, 0, 1, 1, -1});
  const auto out = transform(vec({1, -1, 2}), p, config, false, nullptr);
  expect_vec(out.projected, {3, 0, 0});
  expect_vec(out.encoded, {3, 3, 3});
  EXPECT_EQ(out.dropout_mask.size(), 0);
}

TEST(Transform, ZeroResidualPassesThrough) {
  ModelParams p;
  p.transform = mat(2, 2, {1, -2, 0.5, 1});
  p.residual = MatrixXd::Zero(2, 2);
  const auto config = testing::tiny_config(Fusion::kConcat, Activation::kTanh);
  const auto out = transform(vec({0.3, 0.7}), p, config, false, nullptr);
  EXPECT_TRUE(out.encoded.isApprox(out.projected.array().tanh().matrix(), 1e-15));
}

TEST(Transform, NoDropoutMeansTrainEqualsEval) {
  ModelParams p;
  p.transform = mat(2, 2, {1, -2, 0.5, 1});
  p.residual = mat(2, 2, {0.1, 0.2, 0.3, 0.4});
  const auto config = testing::tiny_config();
  Rng rng(1);
  const auto a = transform(vec({0.3, 0.7}), p, config, true, &rng);
  const auto b = transform(vec({0.3, 0.7}), p, config, false, nullptr);
  EXPECT_EQ(a.encoded, b.encoded);
}

TEST(Transform, InvertedDropoutMask) {
  ModelParams p;
  p.transform = MatrixXd::Identity(200, 200);
  p.residual = MatrixXd::Zero(200, 200);
  auto config = testing::tiny_config();
  config.dropout_rate = 0.25;
  Rng rng(3);
  const auto out = transform(VectorXd::Ones(200), p, config, true, &rng);
  ASSERT_EQ(out.dropout_mask.size(), 200);
  int kept = 0;
  for (Eigen::Index i = 0; i < 200; ++i) {
    const double m = out.dropout_mask(i);
    EXPECT_TRUE(m == 0.0 || std::abs(m - 1.0 / 0.75) < 1e-15);
    kept += m > 0.0;
    EXPECT_DOUBLE_EQ(out.projected(i), m);
  }
  EXPECT_GT(kept, 120);
  EXPECT_LT(kept, 180);
  EXPECT_THROW(transform(VectorXd::Ones(200), p, config, true, nullptr), Error);
}

TEST(Decode, ZeroWeightsGiveUniform) {
  ModelParams p;
  p.head_aggregate = MatrixXd::Zero(3, 2);
  p.head_annotator = MatrixXd::Zero(3, 2);
  p.head_annotator_direct = MatrixXd::Zero(3, 2);
  p.head_behavior = MatrixXd::Zero(3, 2);
  const auto out = decode(vec({1, 2}), vec({3, 4}), p);
  for (const auto& probs : out.probs) expect_vec(probs, {1.0 / 3, 1.0 / 3, 1.0 / 3});
}

TEST(Decode, PathCollapse) {
  ModelParams p;
  p.head_aggregate = mat(2, 2, {0.5, -1, 2, 0.25});
  p.head_annotator = p.head_aggregate;
  p.head_annotator_direct = MatrixXd::Zero(2, 3);
  p.head_behavior = MatrixXd::Zero(2, 2);
  const auto out = decode(vec({1, 2}), vec({3, 4, 5}), p);
  EXPECT_TRUE(out.probs[kAnnotatorHead].isApprox(out.probs[kAggregateHead], 1e-15));
}

TEST(Decode, HandFixtureAgainstIndependentSoftmax) {
  ModelParams p;
  p.head_aggregate = mat(3, 2, {1, 0, 0, 1, 1, 1});
  p.head_annotator = mat(3, 2, {0, 1, 1, 0, 0, 0});
  p.head_annotator_direct = mat(3, 2, {1, 0, 0, 0, 2, 0});
  p.head_behavior = mat(3, 2, {0, 0, 1, 1, -1, 0});
  const auto out = decode(vec({1, 2}), vec({1, 0}), p);
  const auto check = [](const VectorXd& got, oracle::Vec logits) {
    const auto want = oracle::softmax(logits);
    for (std::size_t k = 0; k < want.size(); ++k) EXPECT_NEAR(got(k), want[k], 1e-15);
  };
  check(out.probs[kAggregateHead], {1, 2, 3});
  check(out.probs[kAnnotatorHead], {3, 1, 2});
  check(out.probs[kBehaviorHead], {0, 3, -1});
}

oracle::Weights oracle_weights(const ModelParams& p) {
  oracle::Weights w;
  for (const auto& t : p.demographic) w.demographic.push_back(oracle::to_mat(t));
  w.alpha_logits = oracle::to_vec(p.alpha_logits);
  w.item_proj = oracle::to_mat(p.item_proj);
  w.interaction = oracle::to_mat(p.interaction);
  w.hadamard_item = oracle::to_mat(p.hadamard_item);
  w.hadamard_annotator = oracle::to_mat(p.hadamard_annotator);
  w.fusion_proj = oracle::to_mat(p.fusion_proj);
  w.transform = oracle::to_mat(p.transform);
  w.residual = oracle::to_mat(p.residual);
  w.head_y = oracle::to_mat(p.head_aggregate);
  w.head_yi = oracle::to_mat(p.head_annotator);
  w.head_yi_a = oracle::to_mat(p.head_annotator_direct);
  w.head_ya = oracle::to_mat(p.head_behavior);
  return w;
}

void expect_same(const VectorXd& got, const oracle::Vec& want, double tol, const char* what) {
  ASSERT_EQ(static_cast<std::size_t>(got.size()), want.size()) << what;
  for (std::size_t k = 0; k < want.size(); ++k) EXPECT_NEAR(got(k), want[k], tol) << what << "[" << k << "]";
}

void check_against_oracle(const ModelConfig& config, const ModelParams& params, double tol) {
  const Corpus corpus = testing::tiny_corpus();
  const auto weights = oracle_weights(params);
  for (const auto& ann : corpus.annotations) {
    const auto& item = corpus.items[ann.item];
    const auto& profile = corpus.annotators[ann.annotator];
    const ForwardTrace t = forward(item, profile, params, config, false, nullptr);
    const auto ref = oracle::forward(weights, profile.values, oracle::to_vec(item.features),
                                     std::string(to_string(config.activation)),
                                     config.fusion == Fusion::kSum);
    expect_same(t.alpha, ref.alpha, tol, "alpha");
    expect_same(t.annotator, ref.z_a, tol, "z_a");
    expect_same(t.item, ref.z_i, tol, "z_I");
    expect_same(t.interaction.concat, ref.z_int, tol, "z_int");
    expect_same(t.interaction.hadamard, ref.z_had, tol, "z_had");
    expect_same(t.combined, ref.combined, tol, "combined");
    expect_same(t.transform.projected, ref.z_p, tol, "z_P");
    expect_same(t.transform.encoded, ref.z_e, tol, "z_E");
    expect_same(t.probs(kAggregateHead), ref.p_y, tol, "p_y");
    expect_same(t.probs(kAnnotatorHead), ref.p_yi, tol, "p_yI");
    expect_same(t.probs(kBehaviorHead), ref.p_ya, tol, "p_yA");
  }
}

TEST(Forward, IntegerFixtureMatchesStraightLineEvaluation) {
  const auto config = testing::tiny_config();
  const Corpus corpus = testing::tiny_corpus();
  Rng rng(17);
  ModelParams p = init_params(config, corpus.schema, rng);
  p.for_each([&](const std::string&, auto& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      t.data()[i] = static_cast<double>(static_cast<int>(rng.uniform_index(5)) - 2);
    }
  });
  check_against_oracle(config, p, 1e-12);
}

TEST(Forward, RandomParamsEveryActivationAndFusion) {
  for (auto fusion : {Fusion::kConcat, Fusion::kSum}) {
    for (auto act : {Activation::kRelu, Activation::kSoftsign, Activation::kTanh, Activation::kElu}) {
      const auto config = testing::tiny_config(fusion, act);
      check_against_oracle(config, testing::random_params(config, testing::tiny_corpus().schema, 5),
                           1e-12);
    }
  }
}

TEST(Forward, EvalModeIsDeterministicAndIgnoresRng) {
  auto config = testing::tiny_config();
  config.dropout_rate = 0.5;
  const Corpus c = testing::tiny_corpus();
  const auto p = testing::random_params(config, c.schema, 8);
  Rng rng(1);
  const auto before = rng.next_u64();
  Rng rng2(1);
  const auto a = forward(c.items[0], c.annotators[0], p, config, false, &rng2);
  EXPECT_EQ(rng2.next_u64(), before);  // untouched
  const auto b = forward(c.items[0], c.annotators[0], p, config, false, nullptr);
  for (std::size_t h = 0; h < kNumHeads; ++h) EXPECT_EQ(a.heads.probs[h], b.heads.probs[h]);
}

TEST(Forward, MaskReplayReproducesTrainingPass) {
  auto config = testing::tiny_config();
  config.dropout_rate = 0.4;
  const Corpus c = testing::tiny_corpus();
  const auto p = testing::random_params(config, c.schema, 9);
  Rng rng(2);
  const auto train = forward(c.items[1], c.annotators[2], p, config, true, &rng);
  const auto replay = forward_with_mask(c.items[1], c.annotators[2], p, config, train.transform.dropout_mask);
  for (std::size_t h = 0; h < kNumHeads; ++h) EXPECT_EQ(train.heads.probs[h], replay.heads.probs[h]);
}

TEST(Activations, DerivativesMatchCentralDifferences) {
  const VectorXd x = vec({-1.7, -0.3, 0.4, 2.2});
  for (auto act : {Activation::kRelu, Activation::kSoftsign, Activation::kTanh, Activation::kElu}) {
    const VectorXd d = activate_derivative(act, x);
    const VectorXd num =
        (activate(act, x.array() + 1e-6) - activate(act, x.array() - 1e-6)) / 2e-6;
    EXPECT_TRUE(d.isApprox(num, 1e-7)) << to_string(act);
  }
  EXPECT_EQ(activate_derivative(Activation::kRelu, vec({0.0}))(0), 0.0);
}

TEST(Argmax, TiesGoToLowestIndex) {
  EXPECT_EQ(argmax(vec({0.5, 0.5})), 0u);
  EXPECT_EQ(argmax(vec({0.1, 0.45, 0.45})), 1u);
}

TEST(InitParams, GlorotBoundsAndUniformAlpha) {
  ModelConfig config = testing::tiny_config();
  config.annotator_dim = 5;
  config.item_dim = 7;
  const Corpus c = testing::tiny_corpus();
  Rng rng(4);
  const auto p = init_params(config, c.schema, rng);
  p.check_shapes(config, c.schema);
  EXPECT_EQ(p.alpha_logits, VectorXd::Zero(2));
  const double bound = std::sqrt(6.0 / (7 + 3));
  EXPECT_LE(p.item_proj.cwiseAbs().maxCoeff(), bound);
  EXPECT_EQ(p.demographic[1].rows(), 4);  // three categories + UNK
  Rng again(4);
  const auto q = init_params(config, c.schema, again);
  EXPECT_EQ(p.transform, q.transform);
}

}  // namespace
}  // namespace diadem
