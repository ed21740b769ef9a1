// Copyright (c) 2026 The sphot authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "sphot/measures.hpp"
#include "sphot/synth.hpp"

using sphot::ErrorCode;
using sphot::Rng;
using testutil::check_error;

namespace {

sphot::LikelihoodMatrix likelihoods_from(
    const std::vector<std::vector<double>>& rows,
    const std::vector<std::string>& object_ids) {
  sphot::LikelihoodMatrix lik;
  lik.object_ids = object_ids;
  lik.p.resize(static_cast<Eigen::Index>(rows.size()),
               static_cast<Eigen::Index>(object_ids.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    lik.video_ids.push_back("v" + std::to_string(i));
    for (std::size_t j = 0; j < object_ids.size(); ++j)
      lik.p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  }
  return lik;
}

}  // namespace

TEST_CASE("action measure is uniform over prototypes in label order") {
  Rng rng(21);
  for (const int n : {1, 4, 101}) {
    const sphot::PrototypeSet set = testutil::random_prototypes(n, 8, rng);
    const sphot::DiscreteMeasure m = sphot::build_action_measure(set);
    m.validate();
    CHECK(m.size() == n);
    CHECK((m.support - set.vectors).cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index i = 0; i < m.size(); ++i)
      CHECK(m.weights[i] == doctest::Approx(1.0 / n).epsilon(1e-12));
    CHECK(std::abs(m.weights.sum() - 1.0) <= 1e-9);
  }

  check_error(ErrorCode::EmptyPrototypeSet,
              [] { sphot::build_action_measure(sphot::PrototypeSet{}); });
}

TEST_CASE("kmeans with k equal to n makes every point its own center") {
  Rng rng(22);
  const sphot::EmbeddingSet items = testutil::random_embeddings(6, 5, rng);
  const sphot::ClusterModel model = sphot::spherical_kmeans(items, 6, 0);
  CHECK(model.k == 6);
  std::vector<bool> used(6, false);
  for (Eigen::Index i = 0; i < 6; ++i) {
    const Eigen::Index c = model.assignment[static_cast<std::size_t>(i)];
    CHECK_FALSE(used[static_cast<std::size_t>(c)]);
    used[static_cast<std::size_t>(c)] = true;
    CHECK((model.centers.row(c) - items.vectors.row(i)).norm() <= 1e-9);
  }
}

TEST_CASE("kmeans with k=1 returns the normalized mean") {
  Rng rng(23);
  const sphot::EmbeddingSet items = testutil::random_embeddings(40, 4, rng);
  const sphot::ClusterModel model = sphot::spherical_kmeans(items, 1, 7);
  Eigen::VectorXd mean = items.vectors.colwise().mean().transpose();
  mean /= mean.norm();
  CHECK((model.centers.row(0).transpose() - mean).norm() <= 1e-9);
}

TEST_CASE("kmeans separates two vMF bumps exactly") {
  Rng rng(24);
  Eigen::VectorXd c1(6), c2(6);
  c1 << 1, 0, 0, 0, 0, 0;
  c2 << 0, 1, 0, 0, 0, 0;
  const Eigen::MatrixXd s1 = sphot::sample_vmf(c1, 200.0, 30, rng);
  const Eigen::MatrixXd s2 = sphot::sample_vmf(c2, 200.0, 30, rng);
  sphot::EmbeddingSet items;
  items.vectors.resize(60, 6);
  items.vectors.topRows(30) = s1;
  items.vectors.bottomRows(30) = s2;
  for (int i = 0; i < 60; ++i) items.ids.push_back("v" + std::to_string(i));

  const sphot::ClusterModel model = sphot::spherical_kmeans(items, 2, 3);
  const Eigen::Index first = model.assignment[0];
  for (int i = 0; i < 30; ++i)
    CHECK(model.assignment[static_cast<std::size_t>(i)] == first);
  for (int i = 30; i < 60; ++i)
    CHECK(model.assignment[static_cast<std::size_t>(i)] == 1 - first);
}

TEST_CASE("kmeans is deterministic and self-consistent at convergence") {
  Rng rng(25);
  const sphot::EmbeddingSet items = testutil::random_embeddings(50, 6, rng);
  const sphot::ClusterModel a = sphot::spherical_kmeans(items, 5, 42);
  const sphot::ClusterModel b = sphot::spherical_kmeans(items, 5, 42);
  CHECK((a.centers - b.centers).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.assignment == b.assignment);

  // Assignment maximizes cosine similarity to the assigned center.
  for (Eigen::Index i = 0; i < items.size(); ++i) {
    const Eigen::VectorXd sims = a.centers * items.vectors.row(i).transpose();
    Eigen::Index best = 0;
    sims.maxCoeff(&best);
    CHECK(sims[a.assignment[static_cast<std::size_t>(i)]] ==
          doctest::Approx(sims[best]).epsilon(1e-12));
  }

  // Non-empty centers equal normalized means of their members.
  const auto sizes = a.cluster_sizes();
  for (int c = 0; c < a.k; ++c) {
    if (sizes[static_cast<std::size_t>(c)] == 0) continue;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(6);
    for (Eigen::Index i = 0; i < items.size(); ++i)
      if (a.assignment[static_cast<std::size_t>(i)] == c)
        mean += items.vectors.row(i).transpose();
    mean /= mean.norm();
    CHECK((a.centers.row(c).transpose() - mean).norm() <= 1e-9);
  }

  // The tracked assignment objective never increases.
  for (std::size_t t = 1; t < a.objective_history.size(); ++t)
    CHECK(a.objective_history[t] <= a.objective_history[t - 1] + 1e-12);
}

TEST_CASE("kmeans rejects bad inputs") {
  Rng rng(26);
  const sphot::EmbeddingSet items = testutil::random_embeddings(3, 4, rng);
  check_error(ErrorCode::KTooLarge,
              [&] { sphot::spherical_kmeans(items, 4, 0); });
  check_error(ErrorCode::EmptyInput, [] {
    sphot::spherical_kmeans(sphot::EmbeddingSet{}, 1, 0);
  });
}

TEST_CASE("video measure drops empty clusters and stays uniform") {
  Rng rng(27);
  const sphot::EmbeddingSet items = testutil::random_embeddings(10, 5, rng);
  const auto [measure, model] = sphot::build_video_measure(items, 10, 1);
  measure.validate();
  CHECK(measure.size() == 10);
  for (Eigen::Index i = 0; i < 10; ++i)
    CHECK(measure.weights[i] == doctest::Approx(0.1).epsilon(1e-12));

  // All items identical: every surviving support point carries weight 1.
  sphot::EmbeddingSet same;
  same.vectors.resize(4, 5);
  const Eigen::VectorXd p = rng.unit_vector(5);
  for (int i = 0; i < 4; ++i) {
    same.vectors.row(i) = p.transpose();
    same.ids.push_back("s" + std::to_string(i));
  }
  const auto [collapsed, cmodel] = sphot::build_video_measure(same, 2, 9);
  collapsed.validate();
  CHECK(collapsed.size() == 1);
  CHECK(collapsed.weights[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("size-proportional video weighting matches cluster sizes") {
  Rng rng(28);
  const sphot::EmbeddingSet items = testutil::random_embeddings(30, 4, rng);
  const auto [measure, model] = sphot::build_video_measure(
      items, 3, 5, sphot::VideoWeighting::SizeProportional);
  measure.validate();
  const auto sizes = model.cluster_sizes();
  Eigen::Index support_row = 0;
  for (int c = 0; c < model.k; ++c) {
    if (sizes[static_cast<std::size_t>(c)] == 0) continue;
    CHECK(measure.weights[support_row] ==
          doctest::Approx(static_cast<double>(sizes[static_cast<std::size_t>(c)]) /
                          30.0)
              .epsilon(1e-12));
    ++support_row;
  }
}

TEST_CASE("object filtering by threshold and top-N") {
  const auto lik = likelihoods_from(
      {{0.9, 0.5, 0.2, 0.1, 0.0}, {0.1, 0.4, 0.5, 0.05, 0.0}},
      {"oa", "ob", "oc", "od", "oe"});

  // tau = 0 keeps everything.
  CHECK(sphot::filter_objects(lik, sphot::ThresholdFilter{0.0}).size() == 5);
  // top-N at the full count keeps everything.
  CHECK(sphot::filter_objects(lik, sphot::TopNFilter{5}).size() == 5);

  // Maxima are (0.9, 0.5, 0.5, 0.1, 0.0); the 0.5 tie breaks by id.
  const auto top2 = sphot::filter_objects(lik, sphot::TopNFilter{2});
  REQUIRE(top2.size() == 2);
  CHECK(top2[0] == "oa");
  CHECK(top2[1] == "ob");

  // A stricter threshold selects a subset.
  const auto loose = sphot::filter_objects(lik, sphot::ThresholdFilter{0.2});
  const auto strict = sphot::filter_objects(lik, sphot::ThresholdFilter{0.6});
  for (const auto& id : strict)
    CHECK(std::find(loose.begin(), loose.end(), id) != loose.end());

  check_error(ErrorCode::EmptySelection, [&] {
    sphot::filter_objects(lik, sphot::ThresholdFilter{0.95});
  });
}

TEST_CASE("object weights are normalized transductive maxima") {
  const auto lik = likelihoods_from({{0.8, 0.1, 0.3}, {0.2, 0.2, 0.3}},
                                    {"oa", "ob", "oc"});

  const Eigen::VectorXd single = sphot::object_weights(lik, {"ob"});
  CHECK(single.size() == 1);
  CHECK(single[0] == doctest::Approx(1.0).epsilon(1e-12));

  const Eigen::VectorXd pair = sphot::object_weights(lik, {"oa", "ob"});
  CHECK(pair[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(pair[1] == doctest::Approx(0.2).epsilon(1e-12));

  const auto thirds = likelihoods_from({{0.3, 0.3, 0.3}}, {"oa", "ob", "oc"});
  const Eigen::VectorXd w = sphot::object_weights(thirds, {"oa", "ob", "oc"});
  for (int i = 0; i < 3; ++i)
    CHECK(w[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(std::abs(w.sum() - 1.0) <= 1e-9);

  const auto zeros = likelihoods_from({{0.0, 0.0}}, {"oa", "ob"});
  check_error(ErrorCode::AllZeroLikelihoods,
              [&] { sphot::object_weights(zeros, {"oa", "ob"}); });
}

TEST_CASE("action weights invert the best object similarity") {
  // Two actions against a single object: one coincides with it (similarity
  // 1, unnormalized weight 0) and one is antipodal (similarity -1, weight 1).
  sphot::PrototypeSet objects;
  objects.labels = {"obj"};
  objects.vectors.resize(1, 4);
  objects.vectors << 1, 0, 0, 0;

  sphot::PrototypeSet actions;
  actions.labels = {"hit", "miss"};
  actions.vectors.resize(2, 4);
  actions.vectors << 1, 0, 0, 0, -1, 0, 0, 0;

  const Eigen::VectorXd w = sphot::action_weights_vs_objects(actions, objects);
  CHECK(w[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(w.sum() - 1.0) <= 1e-9);
}

TEST_CASE("action weights are permutation equivariant") {
  Rng rng(29);
  const sphot::PrototypeSet objects = testutil::random_prototypes(6, 5, rng, "o");
  sphot::PrototypeSet actions = testutil::random_prototypes(4, 5, rng, "a");
  const Eigen::VectorXd w = sphot::action_weights_vs_objects(actions, objects);

  sphot::PrototypeSet reversed;
  for (int i = 3; i >= 0; --i) {
    reversed.labels.push_back(actions.labels[static_cast<std::size_t>(i)]);
  }
  reversed.vectors = actions.vectors.colwise().reverse();
  const Eigen::VectorXd rw =
      sphot::action_weights_vs_objects(reversed, objects);
  for (int i = 0; i < 4; ++i)
    CHECK(rw[i] == doctest::Approx(w[3 - i]).epsilon(1e-12));
}

TEST_CASE("action weights degenerate when every action matches an object") {
  sphot::PrototypeSet objects;
  objects.labels = {"o0", "o1"};
  objects.vectors.resize(2, 3);
  objects.vectors << 1, 0, 0, 0, 1, 0;

  sphot::PrototypeSet actions;
  actions.labels = {"a0", "a1"};
  actions.vectors = objects.vectors;

  check_error(ErrorCode::DegenerateWeights,
              [&] { sphot::action_weights_vs_objects(actions, objects); });
}
