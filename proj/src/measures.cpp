// Copyright (c) 2026 The sphot authors.
// SPDX-License-Identifier: Apache-2.0

#include "sphot/measures.hpp"

#include <algorithm>
#include <numeric>

#include "sphot/rng.hpp"

namespace sphot {

DiscreteMeasure build_action_measure(const PrototypeSet& prototypes) {
  prototypes.validate();
  const Eigen::Index n = prototypes.size();
  DiscreteMeasure measure;
  measure.support = prototypes.vectors;
  measure.weights = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  return measure;
}

namespace {

double assignment_objective(const Eigen::MatrixXd& similarity,
                            const std::vector<Eigen::Index>& assignment) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < similarity.rows(); ++i)
    total += 1.0 - similarity(i, assignment[static_cast<std::size_t>(i)]);
  return total;
}

}  // namespace

ClusterModel spherical_kmeans(const EmbeddingSet& items, int k,
                              std::uint64_t seed) {
  items.validate();
  const Eigen::Index n = items.size();
  if (n == 0) throw Error(ErrorCode::EmptyInput, "spherical_kmeans: no items");
  if (k < 1)
    throw Error(ErrorCode::InvalidArgument, "spherical_kmeans: k must be >= 1");
  if (static_cast<Eigen::Index>(k) > n)
    throw Error(ErrorCode::KTooLarge,
                "spherical_kmeans: k exceeds the number of items");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!is_unit_norm(items.vectors.row(i)))
      throw Error(ErrorCode::InvalidArgument,
                  "spherical_kmeans: item '" + items.ids[i] +
                      "' is not unit-norm");

  const Eigen::MatrixXd& X = items.vectors;
  Rng rng(seed);

  // k-means++ style seeding on cosine distance: first center uniform, then
  // points sampled with probability proportional to squared distance to the
  // nearest chosen center.
  Eigen::MatrixXd centers(k, X.cols());
  Eigen::VectorXd nearest(n);
  {
    const Eigen::Index first = static_cast<Eigen::Index>(rng.uniform_index(
        static_cast<std::uint64_t>(n)));
    centers.row(0) = X.row(first);
    nearest = (Eigen::VectorXd::Ones(n) - X * centers.row(0).transpose())
                  .cwiseMax(0.0);
    for (int c = 1; c < k; ++c) {
      const Eigen::VectorXd potential = nearest.array().square();
      Eigen::Index pick;
      if (potential.sum() > 0.0) {
        pick = rng.discrete(potential);
      } else {
        // All remaining points coincide with a center; any choice is a tie.
        pick = static_cast<Eigen::Index>(
            rng.uniform_index(static_cast<std::uint64_t>(n)));
      }
      centers.row(c) = X.row(pick);
      nearest = nearest.cwiseMin(
          (Eigen::VectorXd::Ones(n) - X * centers.row(c).transpose())
              .cwiseMax(0.0));
    }
  }

  ClusterModel model;
  model.k = k;
  model.assignment.assign(static_cast<std::size_t>(n), 0);

  constexpr int kMaxIterations = 300;
  std::vector<Eigen::Index> previous(static_cast<std::size_t>(n),
                                     Eigen::Index(-1));
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    // Assignment step: highest cosine similarity, ties to the lowest index.
    const Eigen::MatrixXd similarity = X * centers.transpose();  // n x k
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      similarity.row(i).maxCoeff(&best);
      model.assignment[static_cast<std::size_t>(i)] = best;
      if (best != previous[static_cast<std::size_t>(i)]) changed = true;
    }
    model.objective_history.push_back(
        assignment_objective(similarity, model.assignment));
    model.iterations = iter + 1;
    if (!changed) break;
    previous = model.assignment;

    // Update step: normalized mean of assigned items; empty clusters keep
    // their previous center.
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, X.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto c = model.assignment[static_cast<std::size_t>(i)];
      sums.row(c) += X.row(i);
      counts[c] += 1.0;
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0.0) continue;
      const double norm = sums.row(c).norm();
      if (norm < kZeroNormTol) continue;  // cancelling cluster, keep center
      centers.row(c) = sums.row(c) / norm;
    }
  }

  model.centers = std::move(centers);
  return model;
}

std::pair<DiscreteMeasure, ClusterModel> build_video_measure(
    const EmbeddingSet& items, int k, std::uint64_t seed,
    VideoWeighting weighting) {
  ClusterModel model = spherical_kmeans(items, k, seed);
  const auto sizes = model.cluster_sizes();

  std::vector<int> kept;
  for (int c = 0; c < model.k; ++c)
    if (sizes[static_cast<std::size_t>(c)] > 0) kept.push_back(c);

  DiscreteMeasure measure;
  measure.support.resize(static_cast<Eigen::Index>(kept.size()),
                         model.centers.cols());
  measure.weights.resize(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t row = 0; row < kept.size(); ++row) {
    measure.support.row(static_cast<Eigen::Index>(row)) =
        model.centers.row(kept[row]);
    measure.weights[static_cast<Eigen::Index>(row)] =
        weighting == VideoWeighting::Uniform
            ? 1.0 / static_cast<double>(kept.size())
            : static_cast<double>(sizes[static_cast<std::size_t>(kept[row])]) /
                  static_cast<double>(items.size());
  }
  measure.validate();
  return {std::move(measure), std::move(model)};
}

std::vector<std::string> filter_objects(const LikelihoodMatrix& likelihoods,
                                        const ObjectFilter& filter) {
  likelihoods.validate();
  const Eigen::VectorXd max_likelihood = likelihoods.p.colwise().maxCoeff();
  const Eigen::Index m = max_likelihood.size();

  std::vector<bool> keep(static_cast<std::size_t>(m), false);
  if (const auto* threshold = std::get_if<ThresholdFilter>(&filter)) {
    for (Eigen::Index j = 0; j < m; ++j)
      keep[static_cast<std::size_t>(j)] =
          max_likelihood[j] >= threshold->tau;
  } else {
    const auto& top_n = std::get<TopNFilter>(filter);
    if (top_n.n < 1)
      throw Error(ErrorCode::InvalidArgument, "filter_objects: N must be >= 1");
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Eigen::Index(0));
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) {
                if (max_likelihood[a] != max_likelihood[b])
                  return max_likelihood[a] > max_likelihood[b];
                return likelihoods.object_ids[static_cast<std::size_t>(a)] <
                       likelihoods.object_ids[static_cast<std::size_t>(b)];
              });
    const auto limit = std::min<std::size_t>(static_cast<std::size_t>(top_n.n),
                                             order.size());
    for (std::size_t r = 0; r < limit; ++r)
      keep[static_cast<std::size_t>(order[r])] = true;
  }

  std::vector<std::string> kept;
  for (Eigen::Index j = 0; j < m; ++j)
    if (keep[static_cast<std::size_t>(j)])
      kept.push_back(likelihoods.object_ids[static_cast<std::size_t>(j)]);
  if (kept.empty())
    throw Error(ErrorCode::EmptySelection,
                "filter_objects: no object survives the filter");
  return kept;
}

Eigen::VectorXd object_weights(const LikelihoodMatrix& likelihoods,
                               const std::vector<std::string>& kept) {
  likelihoods.validate();
  if (kept.empty())
    throw Error(ErrorCode::EmptySelection, "object_weights: empty kept set");

  Eigen::VectorXd maxima(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t r = 0; r < kept.size(); ++r) {
    const auto it = std::find(likelihoods.object_ids.begin(),
                              likelihoods.object_ids.end(), kept[r]);
    if (it == likelihoods.object_ids.end())
      throw Error(ErrorCode::InvalidArgument,
                  "object_weights: unknown object id '" + kept[r] + "'");
    const auto col = static_cast<Eigen::Index>(
        std::distance(likelihoods.object_ids.begin(), it));
    maxima[static_cast<Eigen::Index>(r)] = likelihoods.p.col(col).maxCoeff();
  }
  const double z = maxima.sum();
  if (z < 1e-12)
    throw Error(ErrorCode::AllZeroLikelihoods,
                "object_weights: every kept object has zero likelihood");
  return maxima / z;
}

Eigen::VectorXd action_weights_vs_objects(const PrototypeSet& actions,
                                          const PrototypeSet& objects) {
  actions.validate();
  objects.validate();
  if (actions.dim() != objects.dim())
    throw Error(ErrorCode::DimensionMismatch,
                "action_weights_vs_objects: embedding dimensions differ");

  // u_a = 1 - (max_o <w_a, w_o> / 2 + 0.5), in [0, 1] for unit inputs.
  const Eigen::MatrixXd similarity =
      actions.vectors * objects.vectors.transpose();
  const Eigen::VectorXd best = similarity.rowwise().maxCoeff();
  const Eigen::VectorXd unnormalized =
      (1.0 - (best.array() / 2.0 + 0.5)).cwiseMax(0.0).matrix();
  const double z = unnormalized.sum();
  if (z < 1e-12)
    throw Error(ErrorCode::DegenerateWeights,
                "action_weights_vs_objects: every action matches an object "
                "with similarity 1");
  return unnormalized / z;
}

}  // namespace sphot
