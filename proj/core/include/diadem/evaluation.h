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
#include <string>
#include <vector>

#include "diadem/dataset.h"
#include "diadem/metrics.h"
#include "diadem/network.h"

namespace diadem {

struct EvalOptions {
  std::size_t n_bins = 15;
};

/// Per-item disagreement statistics, the raw material of the correlation
/// fields and of the (actual, predicted) TSV.
struct ItemDisagreement {
  std::string item_id;
  std::size_t n_annotators = 0;
  double actual_variance = 0.0;
  double predicted_variance = 0.0;
  double actual_entropy = 0.0;
  double predicted_entropy = 0.0;
};

struct Evaluation {
  EvalReport report;
  std::vector<ItemDisagreement> items;
};

/// Eval-mode forward over every annotation in `view`. Predictions are the
/// argmax of the per-annotator head; an item's predicted distribution is the
/// mean of that head over the item's annotators. Items with fewer than two
/// annotators are left out of the disagreement correlations; with fewer than
/// three eligible items the correlations stay 0.
Evaluation evaluate(const Corpus& view, const ModelParams& params, const ModelConfig& config,
                    const EvalOptions& options = {});

}  // namespace diadem
