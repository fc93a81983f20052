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

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "diadem/dataset.h"
#include "diadem/evaluation.h"
#include "diadem/metrics.h"
#include "diadem/network.h"
#include "diadem/training.h"

namespace diadem {

/// One JSON object, keys named exactly as the EvalReport fields.
std::string eval_report_json(const EvalReport& report);
/// Aligned two-column table.
std::string eval_report_table(const EvalReport& report);

/// One line per epoch: epoch, L_y, L_yi, L_ya, L_dis, L_reg, total, alpha.
std::string train_report_jsonl(const TrainReport& report);

/// Axis names with their alpha, sorted by alpha descending (ties keep axis
/// order).
std::vector<std::pair<std::string, double>> alpha_ranking(const DemographicSchema& schema,
                                                          const ModelParams& params);
std::string alpha_json(const std::vector<std::pair<std::string, double>>& ranking);
std::string alpha_table(const std::vector<std::pair<std::string, double>>& ranking);

/// Tab-separated (actual, predicted) disagreement pairs per item.
void write_disagreement_tsv(std::ostream& out, const std::vector<ItemDisagreement>& items);

}  // namespace diadem
