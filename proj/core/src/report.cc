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

#include "diadem/report.h"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace diadem {

namespace {

using nlohmann::ordered_json;

std::string fixed(double value, int digits = 4) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", digits, value);
  return buffer;
}

}  // namespace

std::string eval_report_json(const EvalReport& r) {
  const ordered_json j{{"accuracy", r.accuracy},         {"f1_macro", r.f1_macro},
                       {"f1_weighted", r.f1_weighted},   {"kappa", r.kappa},
                       {"mcc", r.mcc},                   {"jsd", r.jsd},
                       {"md", r.md},                     {"er", r.er},
                       {"ece", r.ece},                   {"var_pearson", r.var_pearson},
                       {"var_spearman", r.var_spearman}, {"ent_pearson", r.ent_pearson},
                       {"ent_spearman", r.ent_spearman}, {"collapse_flag", r.collapse_flag},
                       {"n_samples", r.n_samples},       {"n_items", r.n_items}};
  return j.dump(2) + "\n";
}

std::string eval_report_table(const EvalReport& r) {
  const std::vector<std::pair<std::string, std::string>> rows{
      {"accuracy", fixed(r.accuracy)},
      {"f1_macro", fixed(r.f1_macro)},
      {"f1_weighted", fixed(r.f1_weighted)},
      {"kappa", fixed(r.kappa)},
      {"mcc", fixed(r.mcc)},
      {"jsd", fixed(r.jsd)},
      {"md", fixed(r.md)},
      {"er", fixed(r.er)},
      {"ece", fixed(r.ece)},
      {"var_pearson", fixed(r.var_pearson)},
      {"var_spearman", fixed(r.var_spearman)},
      {"ent_pearson", fixed(r.ent_pearson)},
      {"ent_spearman", fixed(r.ent_spearman)},
      {"collapse_flag", r.collapse_flag ? "true" : "false"},
      {"n_samples", std::to_string(r.n_samples)},
      {"n_items", std::to_string(r.n_items)},
  };
  std::ostringstream out;
  out << "metric          value\n";
  out << "--------------  ----------\n";
  for (const auto& [name, value] : rows) {
    out << name << std::string(16 - name.size(), ' ') << value << '\n';
  }
  if (r.collapse_flag) {
    out << "\nwarning: predictions are degenerate (single-class collapse or constant\n"
           "disagreement); low divergence scores are not meaningful.\n";
  }
  return out.str();
}

std::string train_report_jsonl(const TrainReport& report) {
  std::string out;
  for (const auto& e : report.epochs) {
    const ordered_json j{{"epoch", e.epoch},
                         {"L_y", e.loss.aggregate_nll},
                         {"L_yi", e.loss.annotator_kl},
                         {"L_ya", e.loss.behavior_kl},
                         {"L_dis", e.loss.disagreement},
                         {"L_reg", e.loss.regularization},
                         {"total", e.loss.total},
                         {"alpha", std::vector<double>(e.alpha.data(), e.alpha.data() + e.alpha.size())}};
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<std::pair<std::string, double>> alpha_ranking(const DemographicSchema& schema,
                                                          const ModelParams& params) {
  const Eigen::VectorXd alpha = demographic_weights(params.alpha_logits);
  std::vector<std::pair<std::string, double>> ranking;
  for (std::size_t d = 0; d < schema.size(); ++d) {
    ranking.emplace_back(schema.axes[d].name, alpha[static_cast<Eigen::Index>(d)]);
  }
  std::stable_sort(ranking.begin(), ranking.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return ranking;
}

std::string alpha_json(const std::vector<std::pair<std::string, double>>& ranking) {
  ordered_json axes = ordered_json::array();
  double total = 0.0;
  for (const auto& [name, value] : ranking) {
    axes.push_back({{"axis", name}, {"alpha", value}});
    total += value;
  }
  return ordered_json{{"alpha", axes}, {"sum", total}}.dump(2) + "\n";
}

std::string alpha_table(const std::vector<std::pair<std::string, double>>& ranking) {
  std::size_t width = 11;
  for (const auto& entry : ranking) width = std::max(width, entry.first.size());
  std::ostringstream out;
  out << "Demographic" << std::string(width + 2 - 11, ' ') << "alpha\n";
  double total = 0.0;
  for (const auto& [name, value] : ranking) {
    out << name << std::string(width + 2 - name.size(), ' ') << fixed(value) << '\n';
    total += value;
  }
  out << "sum" << std::string(width + 2 - 3, ' ') << fixed(total) << '\n';
  return out.str();
}

void write_disagreement_tsv(std::ostream& out, const std::vector<ItemDisagreement>& items) {
  out << "item_id\tn_annotators\tactual_variance\tpredicted_variance\tactual_entropy\t"
         "predicted_entropy\n";
  for (const auto& item : items) {
    out << item.item_id << '\t' << item.n_annotators << '\t' << fixed(item.actual_variance, 6)
        << '\t' << fixed(item.predicted_variance, 6) << '\t' << fixed(item.actual_entropy, 6)
        << '\t' << fixed(item.predicted_entropy, 6) << '\n';
  }
}

}  // namespace diadem
