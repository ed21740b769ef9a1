// Copyright (c) 2026 The sphot authors.
// SPDX-License-Identifier: Apache-2.0
//
// Construction of the discrete measures consumed by the transport solver:
// class prototypes as a uniform measure, clustered test embeddings as a
// uniform measure over k-means centers, and likelihood-filtered objects with
// transductive weights.

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "sphot/types.hpp"

namespace sphot {

/// Spherical k-means result. `assignment[i]` is the center index of item i
/// in the input EmbeddingSet order; every center is unit-norm.
struct ClusterModel {
  Eigen::MatrixXd centers;  // k x d
  std::vector<Eigen::Index> assignment;
  int k = 0;
  int iterations = 0;
  // Total within-cluster cosine distance after each assignment step;
  // non-increasing by construction.
  std::vector<double> objective_history;

  std::vector<Eigen::Index> cluster_sizes() const {
    std::vector<Eigen::Index> sizes(static_cast<std::size_t>(k), 0);
    for (auto c : assignment) sizes[static_cast<std::size_t>(c)]++;
    return sizes;
  }
};

/// Uniform measure over class prototypes, support in label order.
DiscreteMeasure build_action_measure(const PrototypeSet& prototypes);

/// Spherical k-means: assignment maximizes cosine similarity to the center,
/// centers are normalized means. Seeding is k-means++ style on squared
/// cosine distance, deterministic for a given seed. Stops when assignments
/// are unchanged or after 300 iterations.
ClusterModel spherical_kmeans(const EmbeddingSet& items, int k,
                              std::uint64_t seed);

enum class VideoWeighting {
  Uniform,           // 1/k over non-empty clusters
  SizeProportional,  // cluster size / item count
};

/// Measure over k-means cluster centers. Empty clusters are dropped from the
/// support before weighting.
std::pair<DiscreteMeasure, ClusterModel> build_video_measure(
    const EmbeddingSet& items, int k, std::uint64_t seed,
    VideoWeighting weighting = VideoWeighting::Uniform);

struct ThresholdFilter {
  double tau = 0.05;
};
struct TopNFilter {
  int n = 1000;
};
using ObjectFilter = std::variant<ThresholdFilter, TopNFilter>;

/// Object ids whose transductive maximum likelihood max_v p(o|v) survives the
/// filter, returned in the original column order of `likelihoods`. Top-N ties
/// break by ascending object id.
std::vector<std::string> filter_objects(const LikelihoodMatrix& likelihoods,
                                        const ObjectFilter& filter);

/// Transductive object weights: w_o = max_v p(o|v) / Z_o over the kept ids.
Eigen::VectorXd object_weights(const LikelihoodMatrix& likelihoods,
                               const std::vector<std::string>& kept);

/// Action weights inverse to the best word-embedding match among the kept
/// objects: u_a = 1 - (max_o <w_a, w_o> / 2 + 0.5), normalized to sum 1.
Eigen::VectorXd action_weights_vs_objects(const PrototypeSet& actions,
                                          const PrototypeSet& objects);

}  // namespace sphot
