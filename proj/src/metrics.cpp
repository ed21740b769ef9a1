// Copyright (c) 2026 The sphot authors.
// SPDX-License-Identifier: Apache-2.0

#include "sphot/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "sphot/error.hpp"

namespace sphot {

namespace {

std::unordered_map<std::string, Eigen::Index> label_index(
    const std::vector<std::string>& labels) {
  std::unordered_map<std::string, Eigen::Index> out;
  out.reserve(labels.size());
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(labels.size()); ++i)
    out.emplace(labels[static_cast<std::size_t>(i)], i);
  return out;
}

/// Column index of each item's true label; MissingTruth when absent.
std::vector<Eigen::Index> truth_columns(const ScoreMatrix& scores,
                                        const TruthMap& truth) {
  const auto index = label_index(scores.labels);
  std::vector<Eigen::Index> out;
  out.reserve(scores.item_ids.size());
  for (const std::string& item : scores.item_ids) {
    const auto entry = truth.find(item);
    if (entry == truth.end())
      throw Error(ErrorCode::MissingTruth,
                  "no ground-truth label for item '" + item + "'");
    const auto col = index.find(entry->second);
    if (col == index.end())
      throw Error(ErrorCode::MissingTruth,
                  "truth label '" + entry->second + "' of item '" + item +
                      "' is not a score column");
    out.push_back(col->second);
  }
  return out;
}

std::string format_fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

double EvalReport::never_predicted_fraction() const {
  if (selection_counts.size() == 0) return 0.0;
  const Eigen::Index never =
      (selection_counts.array() == 0).cast<Eigen::Index>().sum();
  return static_cast<double>(never) /
         static_cast<double>(selection_counts.size());
}

double top_k_accuracy(const ScoreMatrix& scores, const TruthMap& truth,
                      int k) {
  scores.validate();
  if (k < 1)
    throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  const auto cols = truth_columns(scores, truth);
  const Eigen::Index n = scores.items();
  const Eigen::Index L = scores.label_count();
  const Eigen::Index kk = std::min<Eigen::Index>(k, L);

  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index tc = cols[static_cast<std::size_t>(i)];
    const double target = scores.scores(i, tc);
    // Rank of the true label: labels scoring strictly higher, plus earlier
    // labels tied with it.
    Eigen::Index rank = 0;
    for (Eigen::Index j = 0; j < L; ++j) {
      const double s = scores.scores(i, j);
      if (s > target || (s == target && j < tc)) ++rank;
    }
    if (rank < kk) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

std::pair<Eigen::VectorXi, double> selection_distribution(
    const ScoreMatrix& scores) {
  scores.validate();
  const Eigen::Index n = scores.items();
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(scores.label_count());
  for (Eigen::Index i = 0; i < n; ++i) counts[scores.predict(i)] += 1;

  double entropy = 0.0;
  for (Eigen::Index l = 0; l < counts.size(); ++l) {
    if (counts[l] == 0) continue;
    const double p = static_cast<double>(counts[l]) / static_cast<double>(n);
    entropy -= p * std::log(p);
  }
  return {counts, entropy};
}

std::pair<std::vector<double>, double> per_class_accuracy(
    const ScoreMatrix& scores, const TruthMap& truth) {
  scores.validate();
  const auto cols = truth_columns(scores, truth);
  const Eigen::Index L = scores.label_count();
  Eigen::VectorXi total = Eigen::VectorXi::Zero(L);
  Eigen::VectorXi correct = Eigen::VectorXi::Zero(L);
  for (Eigen::Index i = 0; i < scores.items(); ++i) {
    const Eigen::Index tc = cols[static_cast<std::size_t>(i)];
    total[tc] += 1;
    if (scores.predict(i) == tc) correct[tc] += 1;
  }

  std::vector<double> per(static_cast<std::size_t>(L));
  double mean = 0.0;
  for (Eigen::Index l = 0; l < L; ++l) {
    if (total[l] == 0)
      throw Error(ErrorCode::EmptyClass,
                  "label '" + scores.labels[static_cast<std::size_t>(l)] +
                      "' has no ground-truth items");
    per[static_cast<std::size_t>(l)] =
        static_cast<double>(correct[l]) / static_cast<double>(total[l]);
    mean += per[static_cast<std::size_t>(l)];
  }
  mean /= static_cast<double>(L);
  return {per, mean};
}

Eigen::MatrixXi confusion_matrix(const ScoreMatrix& scores,
                                 const TruthMap& truth) {
  scores.validate();
  const auto cols = truth_columns(scores, truth);
  const Eigen::Index L = scores.label_count();
  Eigen::MatrixXi confusion = Eigen::MatrixXi::Zero(L, L);
  for (Eigen::Index i = 0; i < scores.items(); ++i)
    confusion(cols[static_cast<std::size_t>(i)], scores.predict(i)) += 1;
  return confusion;
}

std::vector<Eigen::Index> descending_selection_order(
    const Eigen::VectorXi& counts) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(counts.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     return counts[a] > counts[b];
                   });
  return order;
}

EvalReport evaluate(const ScoreMatrix& scores, const TruthMap& truth) {
  EvalReport report;
  report.labels = scores.labels;
  report.items = scores.items();
  report.top1 = top_k_accuracy(scores, truth, 1);
  report.top5 = top_k_accuracy(scores, truth, 5);
  auto [per, mean] = per_class_accuracy(scores, truth);
  report.per_class_accuracy = std::move(per);
  report.mean_per_class_accuracy = mean;
  report.confusion = confusion_matrix(scores, truth);
  auto [counts, entropy] = selection_distribution(scores);
  report.selection_counts = std::move(counts);
  report.selection_entropy = entropy;
  return report;
}

std::string serialize_report(const EvalReport& report) {
  std::ostringstream out;
  out << "items=" << report.items << "\n";
  out << "labels=" << report.labels.size() << "\n";
  out << "top1=" << format_fixed6(report.top1) << "\n";
  out << "top5=" << format_fixed6(report.top5) << "\n";
  out << "mean_per_class_accuracy="
      << format_fixed6(report.mean_per_class_accuracy) << "\n";
  out << "selection_entropy=" << format_fixed6(report.selection_entropy)
      << "\n";
  out << "entropy_units=nats\n";
  out << "max_entropy="
      << format_fixed6(std::log(static_cast<double>(report.labels.size())))
      << "\n";
  out << "never_predicted_fraction="
      << format_fixed6(report.never_predicted_fraction()) << "\n";
  for (std::size_t l = 0; l < report.labels.size(); ++l)
    out << "acc_class." << report.labels[l] << "="
        << format_fixed6(report.per_class_accuracy[l]) << "\n";
  for (std::size_t l = 0; l < report.labels.size(); ++l)
    out << "selected." << report.labels[l] << "="
        << report.selection_counts[static_cast<Eigen::Index>(l)] << "\n";
  return out.str();
}

std::string confusion_csv(const EvalReport& report,
                          const std::vector<Eigen::Index>* column_order) {
  const Eigen::Index L = report.confusion.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(L));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  if (column_order != nullptr) {
    if (static_cast<Eigen::Index>(column_order->size()) != L)
      throw Error(ErrorCode::InvalidArgument,
                  "column order length differs from label count");
    order = *column_order;
  }

  std::ostringstream out;
  out << "label";
  for (const Eigen::Index j : order)
    out << "," << report.labels[static_cast<std::size_t>(j)];
  out << "\n";
  for (Eigen::Index i = 0; i < L; ++i) {
    out << report.labels[static_cast<std::size_t>(i)];
    for (const Eigen::Index j : order) out << "," << report.confusion(i, j);
    out << "\n";
  }
  return out.str();
}

}  // namespace sphot
