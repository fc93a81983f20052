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

// Hot paths: one forward pass, one batch backward, one training epoch, metrics.

#include <benchmark/benchmark.h>

#include <vector>

#include "diadem/dataset.h"
#include "diadem/metrics.h"
#include "diadem/network.h"
#include "diadem/training.h"

namespace diadem {
namespace {

Corpus synth_corpus(std::size_t items) {
  SynthSpec spec;
  spec.n_items = items;
  spec.schema = make_uniform_schema(4, 3);
  spec.seed = 11;
  return synth_generate(spec);
}

ModelConfig model_for(const Corpus& c) {
  ModelConfig m;
  m.num_classes = c.num_classes;
  m.num_axes = c.schema.size();
  m.feature_dim = c.feature_dim();
  return m;
}

void BM_Forward(benchmark::State& state) {
  const Corpus c = synth_corpus(20);
  ModelConfig m = model_for(c);
  m.fusion = state.range(0) == 0 ? Fusion::kConcat : Fusion::kSum;
  Rng rng(1);
  const auto params = init_params(m, c.schema, rng);
  for (auto _ : state) {
    auto trace = forward(c.items[0], c.annotators[0], params, m, true, &rng);
    benchmark::DoNotOptimize(trace.heads.probs[0].data());
  }
}
BENCHMARK(BM_Forward)->Arg(0)->Arg(1)->ArgNames({"sum_fusion"});

void BM_BatchBackward(benchmark::State& state) {
  const Corpus c = synth_corpus(64);
  const ModelConfig m = model_for(c);
  Rng rng(2);
  const auto params = init_params(m, c.schema, rng);
  const auto batch = make_batches(c, static_cast<std::size_t>(state.range(0)), 3, 0).front();
  const auto behaviors = behavior_distributions(c);
  const auto targets = make_targets(batch, behaviors);
  const LossWeights weights;
  for (auto _ : state) {
    const auto traces = forward_batch(c, batch, params, m, true, &rng);
    auto grads = backward(traces, targets, params, weights, m, DisagreementMode::kSurrogate);
    benchmark::DoNotOptimize(grads.alpha_logits.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch.size()));
}
BENCHMARK(BM_BatchBackward)->Arg(1)->Arg(8)->Arg(32)->ArgNames({"items"});

void BM_TrainEpoch(benchmark::State& state) {
  const Corpus c = synth_corpus(static_cast<std::size_t>(state.range(0)));
  const ModelConfig m = model_for(c);
  TrainConfig cfg;
  cfg.epochs = 1;
  for (auto _ : state) {
    auto report = train(c, cfg, m);
    benchmark::DoNotOptimize(report.params.alpha_logits.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainEpoch)->Arg(200)->Arg(1000)->ArgNames({"items"})->Unit(benchmark::kMillisecond);

void BM_DisagreementCorrelation(benchmark::State& state) {
  Rng rng(4);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::vector<int>> actual(n), predicted(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < 10; ++a) {
      actual[i].push_back(static_cast<int>(rng.uniform_index(3)));
      predicted[i].push_back(static_cast<int>(rng.uniform_index(3)));
    }
  }
  for (auto _ : state) {
    auto c = disagreement_correlation(actual, predicted);
    benchmark::DoNotOptimize(c.var_spearman);
  }
}
BENCHMARK(BM_DisagreementCorrelation)->Arg(100)->Arg(10000)->ArgNames({"items"});

void BM_HardMetrics(benchmark::State& state) {
  Rng rng(5);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<int> pred(n), gold(n);
  for (std::size_t i = 0; i < n; ++i) {
    pred[i] = static_cast<int>(rng.uniform_index(4));
    gold[i] = static_cast<int>(rng.uniform_index(4));
  }
  for (auto _ : state) {
    auto h = hard_metrics(pred, gold, 4);
    benchmark::DoNotOptimize(h.mcc);
  }
}
BENCHMARK(BM_HardMetrics)->Arg(1000)->Arg(100000)->ArgNames({"n"});

}  // namespace
}  // namespace diadem

BENCHMARK_MAIN();
