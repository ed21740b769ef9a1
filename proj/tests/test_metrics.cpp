// Copyright (c) 2026 The sphot authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "sphot/metrics.hpp"

using sphot::ErrorCode;
using sphot::EvalReport;
using sphot::Rng;
using sphot::ScoreMatrix;
using sphot::TruthMap;
using testutil::check_error;

namespace {

ScoreMatrix make_scores(std::vector<std::string> items,
                        std::vector<std::string> labels,
                        const Eigen::MatrixXd& values) {
  ScoreMatrix scores;
  scores.item_ids = std::move(items);
  scores.labels = std::move(labels);
  scores.scores = values;
  return scores;
}

/// One-hot rows selecting the given label columns.
ScoreMatrix one_hot_scores(const std::vector<int>& picks, int n_labels) {
  Eigen::MatrixXd values =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(picks.size()),
                            n_labels);
  std::vector<std::string> items;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < picks.size(); ++i) {
    items.push_back("v" + std::to_string(i));
    values(static_cast<Eigen::Index>(i), picks[i]) = 1.0;
  }
  for (int l = 0; l < n_labels; ++l)
    labels.push_back("l" + std::to_string(l));
  return make_scores(std::move(items), std::move(labels), values);
}

}  // namespace

TEST_CASE("top-k accuracy breaks ties by label order") {
  Eigen::MatrixXd values(2, 3);
  values << 0.5, 0.5, 0.1,  // tie between columns 0 and 1
      0.5, 0.5, 0.1;
  const ScoreMatrix scores =
      make_scores({"v0", "v1"}, {"a", "b", "c"}, values);

  // The tied earlier label wins top-1; the tied later label ranks second.
  CHECK(sphot::top_k_accuracy(scores, {{"v0", "a"}, {"v1", "a"}}, 1) == 1.0);
  CHECK(sphot::top_k_accuracy(scores, {{"v0", "b"}, {"v1", "b"}}, 1) == 0.0);
  CHECK(sphot::top_k_accuracy(scores, {{"v0", "b"}, {"v1", "b"}}, 2) == 1.0);
}

TEST_CASE("top-k accuracy is non-decreasing in k and saturates at the "
          "label count") {
  Rng rng(61);
  Eigen::MatrixXd values(10, 4);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 4; ++j) values(i, j) = rng.uniform(-1.0, 1.0);
  std::vector<std::string> items;
  TruthMap truth;
  for (int i = 0; i < 10; ++i) {
    items.push_back("v" + std::to_string(i));
    truth[items.back()] =
        "l" + std::to_string(rng.uniform_index(4));
  }
  const ScoreMatrix scores =
      make_scores(std::move(items), {"l0", "l1", "l2", "l3"}, values);

  double previous = 0.0;
  for (int k = 1; k <= 4; ++k) {
    const double acc = sphot::top_k_accuracy(scores, truth, k);
    CHECK(acc >= previous);
    previous = acc;
  }
  CHECK(sphot::top_k_accuracy(scores, truth, 4) == 1.0);
  CHECK(sphot::top_k_accuracy(scores, truth, 100) == 1.0);
  check_error(ErrorCode::InvalidArgument,
              [&] { sphot::top_k_accuracy(scores, truth, 0); });
}

TEST_CASE("missing or unknown truth labels are rejected") {
  const ScoreMatrix scores = one_hot_scores({0, 1}, 2);
  check_error(ErrorCode::MissingTruth, [&] {
    sphot::top_k_accuracy(scores, {{"v0", "l0"}}, 1);
  });
  check_error(ErrorCode::MissingTruth, [&] {
    sphot::top_k_accuracy(scores, {{"v0", "l0"}, {"v1", "zz"}}, 1);
  });
}

TEST_CASE("top-1 accuracy equals the confusion diagonal mass") {
  Rng rng(62);
  Eigen::MatrixXd values(40, 5);
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 5; ++j) values(i, j) = rng.uniform(-1.0, 1.0);
  std::vector<std::string> items;
  TruthMap truth;
  for (int i = 0; i < 40; ++i) {
    items.push_back("v" + std::to_string(i));
    truth[items.back()] = "l" + std::to_string(i % 5);
  }
  const ScoreMatrix scores = make_scores(
      std::move(items), {"l0", "l1", "l2", "l3", "l4"}, values);

  const Eigen::MatrixXi confusion = sphot::confusion_matrix(scores, truth);
  CHECK(confusion.sum() == 40);
  const double diag_mass =
      static_cast<double>(confusion.diagonal().sum()) / 40.0;
  CHECK(sphot::top_k_accuracy(scores, truth, 1) ==
        doctest::Approx(diag_mass).epsilon(1e-15));

  // Balanced classes: the per-class mean coincides with plain top-1.
  const auto [per, mean] = sphot::per_class_accuracy(scores, truth);
  CHECK(per.size() == 5);
  CHECK(mean == doctest::Approx(diag_mass).epsilon(1e-12));
  for (int l = 0; l < 5; ++l) {
    const double row_total = confusion.row(l).sum();
    CHECK(per[static_cast<std::size_t>(l)] ==
          doctest::Approx(confusion(l, l) / row_total).epsilon(1e-12));
  }
}

TEST_CASE("confusion matrix places counts at (true, predicted)") {
  const ScoreMatrix scores = one_hot_scores({1, 1, 0}, 2);
  const TruthMap truth = {{"v0", "l0"}, {"v1", "l1"}, {"v2", "l0"}};
  const Eigen::MatrixXi confusion = sphot::confusion_matrix(scores, truth);
  CHECK(confusion(0, 0) == 1);
  CHECK(confusion(0, 1) == 1);
  CHECK(confusion(1, 0) == 0);
  CHECK(confusion(1, 1) == 1);

  check_error(ErrorCode::EmptyClass, [&] {
    sphot::per_class_accuracy(one_hot_scores({0, 0}, 2),
                              {{"v0", "l0"}, {"v1", "l0"}});
  });
}

TEST_CASE("selection entropy: uniform maximum, degenerate zero, "
          "permutation invariant") {
  const auto [uniform_counts, uniform_entropy] =
      sphot::selection_distribution(one_hot_scores({0, 1, 2, 3}, 4));
  CHECK(uniform_counts.sum() == 4);
  CHECK(uniform_entropy == doctest::Approx(std::log(4.0)).epsilon(1e-12));

  const auto [mono_counts, mono_entropy] =
      sphot::selection_distribution(one_hot_scores({2, 2, 2}, 4));
  CHECK(mono_entropy == 0.0);
  CHECK(mono_counts[2] == 3);

  const auto [a_counts, a_entropy] =
      sphot::selection_distribution(one_hot_scores({0, 0, 0, 1}, 3));
  const auto [b_counts, b_entropy] =
      sphot::selection_distribution(one_hot_scores({2, 1, 1, 1}, 3));
  CHECK(a_entropy == doctest::Approx(b_entropy).epsilon(1e-12));
  CHECK(a_counts.sum() == b_counts.sum());
}

TEST_CASE("never-predicted fraction counts zero-selection labels") {
  EvalReport report;
  report.selection_counts = Eigen::VectorXi(4);
  report.selection_counts << 3, 0, 1, 0;
  CHECK(report.never_predicted_fraction() == doctest::Approx(0.5));
  report.selection_counts = Eigen::VectorXi(2);
  report.selection_counts << 1, 1;
  CHECK(report.never_predicted_fraction() == 0.0);
}

TEST_CASE("descending selection order is stable under ties") {
  Eigen::VectorXi counts(4);
  counts << 2, 5, 5, 1;
  const auto order = sphot::descending_selection_order(counts);
  CHECK(order == std::vector<Eigen::Index>{1, 2, 0, 3});
}

TEST_CASE("report serialization uses fixed six-decimal keys") {
  Eigen::MatrixXd values(4, 2);
  values << 0.9, 0.1, 0.2, 0.8, 0.6, 0.4, 0.3, 0.7;
  const ScoreMatrix scores =
      make_scores({"v0", "v1", "v2", "v3"}, {"a", "b"}, values);
  const TruthMap truth = {
      {"v0", "a"}, {"v1", "b"}, {"v2", "b"}, {"v3", "a"}};
  const EvalReport report = sphot::evaluate(scores, truth);

  const std::string expected =
      "items=4\n"
      "labels=2\n"
      "top1=0.500000\n"
      "top5=1.000000\n"
      "mean_per_class_accuracy=0.500000\n"
      "selection_entropy=0.693147\n"
      "entropy_units=nats\n"
      "max_entropy=0.693147\n"
      "never_predicted_fraction=0.000000\n"
      "acc_class.a=0.500000\n"
      "acc_class.b=0.500000\n"
      "selected.a=2\n"
      "selected.b=2\n";
  CHECK(sphot::serialize_report(report) == expected);
}

TEST_CASE("confusion CSV permutes predicted columns only") {
  EvalReport report;
  report.labels = {"x", "y"};
  report.confusion = Eigen::MatrixXi(2, 2);
  report.confusion << 2, 1, 0, 3;

  CHECK(sphot::confusion_csv(report) == "label,x,y\nx,2,1\ny,0,3\n");

  const std::vector<Eigen::Index> order = {1, 0};
  CHECK(sphot::confusion_csv(report, &order) ==
        "label,y,x\nx,1,2\ny,3,0\n");

  const std::vector<Eigen::Index> bad = {0};
  check_error(ErrorCode::InvalidArgument,
              [&] { sphot::confusion_csv(report, &bad); });
}
