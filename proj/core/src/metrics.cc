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

#include "diadem/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>

#include "diadem/error.h"
#include "diadem/objective.h"

namespace diadem {

namespace {

using Eigen::Index;
using Eigen::VectorXd;

void check_pairs(std::size_t a, std::size_t b) {
  if (a != b) throw Error(ErrorCode::kLengthMismatch, "inputs differ in length");
  if (a == 0) throw Error(ErrorCode::kEmptyInput, "no samples");
}

void check_distribution(const VectorXd& p) {
  if (std::abs(p.sum() - 1.0) > 1e-6 || (p.array() < 0.0).any()) {
    throw Error(ErrorCode::kNotNormalized, "distribution does not sum to 1");
  }
}

double xlog2_ratio(double x, double y) { return x > 0.0 ? x * std::log2(x / y) : 0.0; }

}  // namespace

std::vector<std::vector<std::size_t>> confusion_matrix(std::span<const int> preds,
                                                       std::span<const int> golds,
                                                       std::size_t num_classes) {
  check_pairs(preds.size(), golds.size());
  std::vector<std::vector<std::size_t>> cm(num_classes, std::vector<std::size_t>(num_classes, 0));
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] < 0 || golds[i] < 0 || static_cast<std::size_t>(preds[i]) >= num_classes ||
        static_cast<std::size_t>(golds[i]) >= num_classes) {
      throw Error(ErrorCode::kLabelOutOfRange, "class index outside [0, K)");
    }
    ++cm[static_cast<std::size_t>(golds[i])][static_cast<std::size_t>(preds[i])];
  }
  return cm;
}

HardMetrics hard_metrics(std::span<const int> preds, std::span<const int> golds,
                         std::size_t num_classes) {
  const auto cm = confusion_matrix(preds, golds, num_classes);
  const auto n = static_cast<double>(preds.size());
  std::vector<double> gold_count(num_classes, 0.0);
  std::vector<double> pred_count(num_classes, 0.0);
  double correct = 0.0;
  for (std::size_t g = 0; g < num_classes; ++g) {
    for (std::size_t p = 0; p < num_classes; ++p) {
      gold_count[g] += static_cast<double>(cm[g][p]);
      pred_count[p] += static_cast<double>(cm[g][p]);
    }
    correct += static_cast<double>(cm[g][g]);
  }

  HardMetrics m;
  m.accuracy = correct / n;

  double macro = 0.0;
  std::size_t present = 0;
  double weighted = 0.0;
  for (std::size_t k = 0; k < num_classes; ++k) {
    const double tp = static_cast<double>(cm[k][k]);
    const double denom = gold_count[k] + pred_count[k];  // 2tp + fp + fn
    if (denom == 0.0) continue;
    const double f1 = 2.0 * tp / denom;
    macro += f1;
    ++present;
    weighted += gold_count[k] * f1;
  }
  m.f1_macro = present == 0 ? 0.0 : macro / static_cast<double>(present);
  m.f1_weighted = weighted / n;

  double chance = 0.0;
  for (std::size_t k = 0; k < num_classes; ++k) chance += gold_count[k] * pred_count[k];
  const double p_o = correct / n;
  const double p_e = chance / (n * n);
  m.kappa = p_e == 1.0 ? 0.0 : (p_o - p_e) / (1.0 - p_e);

  double sum_pred_sq = 0.0;
  double sum_gold_sq = 0.0;
  for (std::size_t k = 0; k < num_classes; ++k) {
    sum_pred_sq += pred_count[k] * pred_count[k];
    sum_gold_sq += gold_count[k] * gold_count[k];
  }
  const double numerator = correct * n - chance;
  const double denominator = std::sqrt((n * n - sum_pred_sq) * (n * n - sum_gold_sq));
  m.mcc = denominator == 0.0 ? 0.0 : numerator / denominator;
  return m;
}

double jensen_shannon(const VectorXd& p, const VectorXd& q) {
  if (p.size() != q.size()) throw Error(ErrorCode::kLengthMismatch, "JSD operands differ in length");
  double js = 0.0;
  for (Index k = 0; k < p.size(); ++k) {
    const double mid = 0.5 * (p[k] + q[k]);
    js += 0.5 * xlog2_ratio(p[k], mid) + 0.5 * xlog2_ratio(q[k], mid);
  }
  return std::clamp(js, 0.0, 1.0);
}

SoftMetrics soft_metrics(std::span<const VectorXd> pred_dists, std::span<const VectorXd> gold_dists) {
  check_pairs(pred_dists.size(), gold_dists.size());
  SoftMetrics m;
  for (std::size_t i = 0; i < pred_dists.size(); ++i) {
    check_distribution(pred_dists[i]);
    check_distribution(gold_dists[i]);
    m.jsd += jensen_shannon(pred_dists[i], gold_dists[i]);
    m.md += (pred_dists[i] - gold_dists[i]).cwiseAbs().sum();
  }
  const auto n = static_cast<double>(pred_dists.size());
  m.jsd /= n;
  m.md /= n;
  return m;
}

double expected_calibration_error(std::span<const double> confidences,
                                  const std::vector<bool>& correct, std::size_t n_bins) {
  check_pairs(confidences.size(), correct.size());
  if (n_bins == 0) throw Error(ErrorCode::kInvalidArgument, "n_bins must be >= 1");
  std::vector<double> conf_sum(n_bins, 0.0);
  std::vector<double> hit_sum(n_bins, 0.0);
  std::vector<std::size_t> count(n_bins, 0);
  const auto bins = static_cast<double>(n_bins);
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    const double c = confidences[i];
    // Bin b covers (b/B, (b+1)/B].
    auto b = static_cast<std::ptrdiff_t>(std::ceil(c * bins)) - 1;
    b = std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(n_bins) - 1);
    conf_sum[static_cast<std::size_t>(b)] += c;
    hit_sum[static_cast<std::size_t>(b)] += correct[i] ? 1.0 : 0.0;
    ++count[static_cast<std::size_t>(b)];
  }
  const auto n = static_cast<double>(confidences.size());
  double ece = 0.0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (count[b] == 0) continue;
    const auto size = static_cast<double>(count[b]);
    ece += (size / n) * std::abs(hit_sum[b] / size - conf_sum[b] / size);
  }
  return ece;
}

PerspectivistMetrics perspectivist_metrics(std::span<const double> confidences,
                                           const std::vector<bool>& correct,
                                           std::span<const VectorXd> pred_dists,
                                           std::span<const VectorXd> gold_dists,
                                           std::size_t n_bins) {
  check_pairs(pred_dists.size(), gold_dists.size());
  PerspectivistMetrics m;
  m.ece = expected_calibration_error(confidences, correct, n_bins);
  for (std::size_t i = 0; i < pred_dists.size(); ++i) {
    if (pred_dists[i].size() != gold_dists[i].size()) {
      throw Error(ErrorCode::kLengthMismatch, "distributions differ in length");
    }
    m.er += 0.5 * (pred_dists[i] - gold_dists[i]).cwiseAbs().sum();
  }
  m.er /= static_cast<double>(pred_dists.size());
  return m;
}

double pearson(std::span<const double> x, std::span<const double> y, bool* degenerate) {
  check_pairs(x.size(), y.size());
  // A constant side is tested directly; its centered sum of squares can pick
  // up rounding residue from the mean.
  const auto constant = [](std::span<const double> v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *lo == *hi;
  };
  if (constant(x) || constant(y)) {
    if (degenerate != nullptr) *degenerate = true;
    return 0.0;
  }
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    if (degenerate != nullptr) *degenerate = true;
    return 0.0;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y, bool* degenerate) {
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry, degenerate);
}

double label_variance(std::span<const int> labels) {
  if (labels.empty()) return 0.0;
  // Ties between items matter for rank correlation, so avoid rounding until the end.
  std::int64_t sum = 0;
  std::int64_t sum_sq = 0;
  for (const int label : labels) {
    sum += label;
    sum_sq += static_cast<std::int64_t>(label) * label;
  }
  const auto n = static_cast<std::int64_t>(labels.size());
  return static_cast<double>(n * sum_sq - sum * sum) / static_cast<double>(n * n);
}

double label_entropy(std::span<const int> labels) {
  if (labels.empty()) return 0.0;
  std::map<int, std::size_t> histogram;
  for (const int label : labels) ++histogram[label];
  std::vector<std::size_t> counts;
  for (const auto& [label, count] : histogram) counts.push_back(count);
  std::sort(counts.begin(), counts.end());
  const auto n = static_cast<double>(labels.size());
  double h = 0.0;
  for (const std::size_t count : counts) {
    const double p = static_cast<double>(count) / n;
    h -= p * std::log2(p);
  }
  return h;
}

DisagreementCorrelation disagreement_correlation(std::span<const std::vector<int>> actual,
                                                 std::span<const std::vector<int>> predicted) {
  if (actual.size() != predicted.size()) {
    throw Error(ErrorCode::kLengthMismatch, "actual and predicted item counts differ");
  }
  if (actual.size() < 3) throw Error(ErrorCode::kTooFewItems, "need at least 3 items");
  std::vector<double> var_actual;
  std::vector<double> var_pred;
  std::vector<double> ent_actual;
  std::vector<double> ent_pred;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i].size() != predicted[i].size()) {
      throw Error(ErrorCode::kLengthMismatch, "item " + std::to_string(i) + " label counts differ");
    }
    if (actual[i].size() < 2) {
      throw Error(ErrorCode::kTooFewItems, "item " + std::to_string(i) + " has < 2 annotators");
    }
    var_actual.push_back(label_variance(actual[i]));
    var_pred.push_back(label_variance(predicted[i]));
    ent_actual.push_back(label_entropy(actual[i]));
    ent_pred.push_back(label_entropy(predicted[i]));
  }
  DisagreementCorrelation c;
  c.var_pearson = pearson(var_actual, var_pred, &c.degenerate);
  c.var_spearman = spearman(var_actual, var_pred, &c.degenerate);
  c.ent_pearson = pearson(ent_actual, ent_pred, &c.degenerate);
  c.ent_spearman = spearman(ent_actual, ent_pred, &c.degenerate);
  return c;
}

bool detect_collapse(std::span<const int> preds, std::size_t num_classes, double threshold) {
  if (preds.empty()) throw Error(ErrorCode::kEmptyInput, "no predictions");
  std::vector<std::size_t> counts(std::max<std::size_t>(num_classes, 1), 0);
  for (const int p : preds) {
    if (p < 0 || static_cast<std::size_t>(p) >= counts.size()) {
      throw Error(ErrorCode::kLabelOutOfRange, "prediction outside [0, K)");
    }
    ++counts[static_cast<std::size_t>(p)];
  }
  const std::size_t top = *std::max_element(counts.begin(), counts.end());
  return static_cast<double>(top) / static_cast<double>(preds.size()) > threshold;
}

}  // namespace diadem
