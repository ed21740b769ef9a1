// Copyright (c) 2026 The sphot authors.
// SPDX-License-Identifier: Apache-2.0
//
// Classification metrics over score matrices: top-k accuracy, per-class
// accuracy, confusion counts, and the entropy of the argmax-selection
// distribution used to quantify prediction bias.

#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

#include "sphot/types.hpp"

namespace sphot {

using TruthMap = std::map<std::string, std::string>;

struct EvalReport {
  std::vector<std::string> labels;
  Eigen::Index items = 0;
  double top1 = 0.0;
  double top5 = 0.0;
  std::vector<double> per_class_accuracy;  // label order
  double mean_per_class_accuracy = 0.0;
  Eigen::MatrixXi confusion;               // (true, predicted) counts
  Eigen::VectorXi selection_counts;        // argmax predictions per label
  double selection_entropy = 0.0;          // nats

  /// Fraction of labels never selected as argmax.
  double never_predicted_fraction() const;
};

/// Fraction of items whose true label ranks among the k highest scores.
/// Ties rank by label order.
double top_k_accuracy(const ScoreMatrix& scores, const TruthMap& truth,
                      int k);

/// Argmax-prediction counts per label and the Shannon entropy (nats) of
/// their frequency distribution, with 0 log 0 = 0.
std::pair<Eigen::VectorXi, double> selection_distribution(
    const ScoreMatrix& scores);

/// Per-label fraction correct among items of that label, plus the
/// unweighted mean across labels. Every label must own at least one item.
std::pair<std::vector<double>, double> per_class_accuracy(
    const ScoreMatrix& scores, const TruthMap& truth);

/// Count matrix with entry (true, predicted); rows and columns follow the
/// score-matrix label order.
Eigen::MatrixXi confusion_matrix(const ScoreMatrix& scores,
                                 const TruthMap& truth);

/// Label permutation sorting by descending selection count, ties by label
/// order; used to reorder confusion columns for bias plots.
std::vector<Eigen::Index> descending_selection_order(
    const Eigen::VectorXi& counts);

/// All metrics in one pass over the scores.
EvalReport evaluate(const ScoreMatrix& scores, const TruthMap& truth);

/// Flat key=value text block; reals in fixed 6-decimal formatting.
std::string serialize_report(const EvalReport& report);

/// Confusion matrix as CSV, one row per true label. An optional column
/// order permutes predicted-label columns only.
std::string confusion_csv(const EvalReport& report,
                          const std::vector<Eigen::Index>* column_order =
                              nullptr);

}  // namespace sphot
