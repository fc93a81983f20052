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
#include <span>
#include <vector>

#include <Eigen/Core>

namespace diadem {

struct HardMetrics {
  double accuracy = 0.0;
  double f1_macro = 0.0;
  double f1_weighted = 0.0;
  double kappa = 0.0;
  double mcc = 0.0;
};

/// K x K counts, rows = gold, columns = prediction.
std::vector<std::vector<std::size_t>> confusion_matrix(std::span<const int> preds,
                                                       std::span<const int> golds,
                                                       std::size_t num_classes);

/// Accuracy, macro/weighted F1, Cohen's kappa and multiclass MCC. Classes
/// absent from both preds and golds are left out of the macro average; a zero
/// denominator in kappa or MCC yields 0.
HardMetrics hard_metrics(std::span<const int> preds, std::span<const int> golds,
                         std::size_t num_classes);

/// Base-2 Jensen-Shannon divergence, in [0, 1].
double jensen_shannon(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

struct SoftMetrics {
  double jsd = 0.0;
  double md = 0.0;  // mean per-item L1 distance, in [0, 2]
};

/// Each distribution must sum to 1 within 1e-6 (kNotNormalized otherwise).
SoftMetrics soft_metrics(std::span<const Eigen::VectorXd> pred_dists,
                         std::span<const Eigen::VectorXd> gold_dists);

/// Equal-width, right-closed confidence bins over [0, 1]; a confidence of
/// exactly 0 falls in the first bin.
double expected_calibration_error(std::span<const double> confidences,
                                  const std::vector<bool>& correct, std::size_t n_bins);

struct PerspectivistMetrics {
  double er = 0.0;  // mean per-item total variation distance
  double ece = 0.0;
};

PerspectivistMetrics perspectivist_metrics(std::span<const double> confidences,
                                           const std::vector<bool>& correct,
                                           std::span<const Eigen::VectorXd> pred_dists,
                                           std::span<const Eigen::VectorXd> gold_dists,
                                           std::size_t n_bins);

/// Pearson correlation; returns 0 and sets *degenerate when either side has
/// zero variance.
double pearson(std::span<const double> x, std::span<const double> y, bool* degenerate = nullptr);

/// 1-based ranks with ties sharing their average rank.
std::vector<double> average_ranks(std::span<const double> values);

double spearman(std::span<const double> x, std::span<const double> y, bool* degenerate = nullptr);

/// Population variance of integer labels, computed from exact integer sums so
/// equal histograms up to relabel shift give bit-identical values.
double label_variance(std::span<const int> labels);

/// Base-2 Shannon entropy of the label histogram. Counts are summed in sorted
/// order so permuted histograms give bit-identical values.
double label_entropy(std::span<const int> labels);

struct DisagreementCorrelation {
  double var_pearson = 0.0;
  double var_spearman = 0.0;
  double ent_pearson = 0.0;
  double ent_spearman = 0.0;
  /// Some correlation had a zero-variance side and was reported as 0.
  bool degenerate = false;
};

/// Per item: population variance of class indices and label entropy, for the
/// actual and predicted labels of the same annotators; correlated across
/// items. Needs >= 3 items with >= 2 labels each (kTooFewItems).
DisagreementCorrelation disagreement_correlation(std::span<const std::vector<int>> actual,
                                                 std::span<const std::vector<int>> predicted);

inline constexpr double kCollapseThreshold = 0.99;

/// True iff one class holds strictly more than `threshold` of predictions.
bool detect_collapse(std::span<const int> preds, std::size_t num_classes,
                     double threshold = kCollapseThreshold);

struct EvalReport {
  double accuracy = 0.0;
  double f1_macro = 0.0;
  double f1_weighted = 0.0;
  double kappa = 0.0;
  double mcc = 0.0;
  double jsd = 0.0;
  double md = 0.0;
  double er = 0.0;
  double ece = 0.0;
  double var_pearson = 0.0;
  double var_spearman = 0.0;
  double ent_pearson = 0.0;
  double ent_spearman = 0.0;
  bool collapse_flag = false;
  std::size_t n_samples = 0;
  std::size_t n_items = 0;
};

}  // namespace diadem
