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

#include "diadem/evaluation.h"

#include "diadem/error.h"
#include "diadem/objective.h"

namespace diadem {

Evaluation evaluate(const Corpus& view, const ModelParams& params, const ModelConfig& config,
                    const EvalOptions& options) {
  if (view.annotations.empty()) throw Error(ErrorCode::kEmptyInput, "nothing to evaluate");
  if (view.num_classes != config.num_classes) {
    throw Error(ErrorCode::kSchemaMismatch, "corpus has " + std::to_string(view.num_classes) +
                                                " classes, model has " +
                                                std::to_string(config.num_classes));
  }
  const auto K = static_cast<Eigen::Index>(config.num_classes);
  const auto by_item = view.annotations_by_item();

  std::vector<int> preds;
  std::vector<int> golds;
  std::vector<double> confidences;
  std::vector<bool> correct;
  std::vector<Eigen::VectorXd> pred_dists;
  std::vector<Eigen::VectorXd> gold_dists;
  std::vector<std::vector<int>> actual_labels;
  std::vector<std::vector<int>> predicted_labels;
  Evaluation result;

  for (std::size_t m = 0; m < by_item.size(); ++m) {
    if (by_item[m].empty()) continue;
    Eigen::VectorXd pred_dist = Eigen::VectorXd::Zero(K);
    Eigen::VectorXd gold_dist = Eigen::VectorXd::Zero(K);
    std::vector<int> item_actual;
    std::vector<int> item_pred;
    for (const std::size_t a : by_item[m]) {
      const Annotation& ann = view.annotations[a];
      const ForwardTrace t =
          forward(view.items[m], view.annotators[ann.annotator], params, config, false, nullptr);
      const Eigen::VectorXd& p = t.probs(kAnnotatorHead);
      const int pred = static_cast<int>(argmax(p));
      preds.push_back(pred);
      golds.push_back(ann.label);
      confidences.push_back(p.maxCoeff());
      correct.push_back(pred == ann.label);
      pred_dist += p;
      gold_dist[ann.label] += 1.0;
      item_actual.push_back(ann.label);
      item_pred.push_back(pred);
    }
    const auto count = static_cast<double>(by_item[m].size());
    pred_dists.push_back(pred_dist / count);
    gold_dists.push_back(gold_dist / count);

    ItemDisagreement stats;
    stats.item_id = view.items[m].item_id;
    stats.n_annotators = by_item[m].size();
    std::vector<double> as(item_actual.begin(), item_actual.end());
    std::vector<double> ps(item_pred.begin(), item_pred.end());
    stats.actual_variance = population_variance(as);
    stats.predicted_variance = population_variance(ps);
    stats.actual_entropy = label_entropy(item_actual);
    stats.predicted_entropy = label_entropy(item_pred);
    result.items.push_back(std::move(stats));
    if (item_actual.size() >= 2) {
      actual_labels.push_back(std::move(item_actual));
      predicted_labels.push_back(std::move(item_pred));
    }
  }

  EvalReport& r = result.report;
  const HardMetrics hard = hard_metrics(preds, golds, config.num_classes);
  r.accuracy = hard.accuracy;
  r.f1_macro = hard.f1_macro;
  r.f1_weighted = hard.f1_weighted;
  r.kappa = hard.kappa;
  r.mcc = hard.mcc;
  const SoftMetrics soft = soft_metrics(pred_dists, gold_dists);
  r.jsd = soft.jsd;
  r.md = soft.md;
  const PerspectivistMetrics persp =
      perspectivist_metrics(confidences, correct, pred_dists, gold_dists, options.n_bins);
  r.er = persp.er;
  r.ece = persp.ece;
  r.collapse_flag = detect_collapse(preds, config.num_classes);
  if (actual_labels.size() >= 3) {
    const DisagreementCorrelation c = disagreement_correlation(actual_labels, predicted_labels);
    r.var_pearson = c.var_pearson;
    r.var_spearman = c.var_spearman;
    r.ent_pearson = c.ent_pearson;
    r.ent_spearman = c.ent_spearman;
    r.collapse_flag = r.collapse_flag || c.degenerate;
  }
  r.n_samples = preds.size();
  r.n_items = pred_dists.size();
  return result;
}

}  // namespace diadem
