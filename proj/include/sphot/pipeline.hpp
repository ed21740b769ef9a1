// Copyright (c) 2026 The sphot authors.
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end prototype transport: re-position class prototypes on the unit
// hypersphere by optimal transport against a test-embedding distribution
// (action path) or an object-prototype distribution (object path), then
// score items, fuse score sources, and re-rank tubes.

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sphot/measures.hpp"
#include "sphot/ot.hpp"
#include "sphot/types.hpp"

namespace sphot {

enum class FusionNorm { MinMax, ZScore, None };
enum class ActionWeighting { Inverse, Uniform };
enum class ObjectWeighting { Transductive, Uniform };

struct PipelineConfig {
  int k = 1000;          // video-measure cluster count
  double lambda = 0.5;   // interpolation ratio; 1 keeps the originals
  ObjectFilter object_filter = TopNFilter{1000};
  int top_objects = 100;  // T: objects per label in object scoring
  double epsilon_fusion = 0.5;
  std::uint64_t seed = 0;
  SphereDistance frechet_distance = SphereDistance::Cosine;
  FusionNorm fusion_norm = FusionNorm::MinMax;
  ActionWeighting action_weighting = ActionWeighting::Inverse;
  ObjectWeighting object_weighting = ObjectWeighting::Transductive;
  VideoWeighting video_weighting = VideoWeighting::Uniform;
  // Select the top-T objects per label with the original prototypes instead
  // of the transported ones (scoring similarities always use the transported
  // prototypes).
  bool select_top_objects_with_original = false;

  void validate() const {
    if (k < 1)
      throw Error(ErrorCode::InvalidArgument, "config: k must be >= 1");
    if (!(lambda >= 0.0 && lambda <= 1.0))
      throw Error(ErrorCode::InvalidArgument,
                  "config: lambda outside [0, 1]");
    if (top_objects < 1)
      throw Error(ErrorCode::InvalidArgument, "config: top_t must be >= 1");
    if (!(epsilon_fusion >= 0.0 && epsilon_fusion <= 1.0))
      throw Error(ErrorCode::InvalidArgument,
                  "config: epsilon outside [0, 1]");
  }
};

/// One target prototype per coupling row: the weighted Frechet mean of the
/// target support under that row's mass. The result is invariant to positive
/// rescaling of the coupling, so raw and normalized couplings agree. Rows
/// with a single positive entry return that support point exactly.
PrototypeSet target_prototypes(const Eigen::MatrixXd& coupling,
                               const DiscreteMeasure& targets,
                               const std::vector<std::string>& labels,
                               SphereDistance distance = SphereDistance::Cosine);

struct ActionTransportResult {
  PrototypeSet transported;      // omega*: slerp(original, target, lambda)
  PrototypeSet targets;          // omega^target per label
  Eigen::MatrixXd coupling;      // normalized coupling P-hat
  DiscreteMeasure video_measure; // cluster-center measure
  ClusterModel clusters;
  OtResult ot;
};

/// Action-model transport: prototypes-as-measure -> clustered videos ->
/// cosine cost -> exact OT -> Frechet targets -> slerp. With lambda = 1 the
/// transported set equals the input bitwise.
ActionTransportResult transport_action_prototypes(
    const PrototypeSet& prototypes, const EmbeddingSet& videos,
    const PipelineConfig& config);

struct ObjectTransportResult {
  PrototypeSet transported;  // omega-double-dagger per action label
  PrototypeSet targets;
  Eigen::MatrixXd coupling;  // normalized
  std::vector<std::string> kept_objects;
  Eigen::VectorXd action_weights;
  Eigen::VectorXd object_weights;
  OtResult ot;
};

/// Object-model transport: actions -> likelihood-filtered, transductively
/// weighted object measure -> exact OT -> Frechet targets -> slerp.
ObjectTransportResult transport_object_prototypes(
    const PrototypeSet& action_prototypes,
    const PrototypeSet& object_prototypes,
    const LikelihoodMatrix& likelihoods, const PipelineConfig& config);

/// Nearest-prototype scores s(l | v) = <phi(v), omega(l)> for unit inputs.
ScoreMatrix score_action(const EmbeddingSet& videos,
                         const PrototypeSet& prototypes);

/// Object-likelihood scores s(l | v) = sum_{o in O_l} p(o|v) <omega(o),
/// omega(l)>, where O_l holds the top_t objects most similar to label l
/// (ties by object id). `selection` optionally overrides the prototype set
/// used to pick O_l; scoring similarities always use `action_prototypes`.
ScoreMatrix score_object(const LikelihoodMatrix& likelihoods,
                         const PrototypeSet& object_prototypes,
                         const PrototypeSet& action_prototypes, int top_t,
                         const PrototypeSet* selection = nullptr);

/// Convex combination epsilon * action + (1 - epsilon) * object after
/// per-item normalization of each source (min-max to [0, 1] by default).
ScoreMatrix fuse_scores(const ScoreMatrix& action_scores,
                        const ScoreMatrix& object_scores, double epsilon,
                        FusionNorm norm = FusionNorm::MinMax);

/// Adds the whole-video score of the enclosing video to every tube score:
/// combined(t, l) = tube(t, l) + video(video_of(t), l).
ScoreMatrix rerank_tubes(const ScoreMatrix& tube_scores,
                         const ScoreMatrix& video_scores,
                         const std::map<std::string, std::string>& tube_to_video);

}  // namespace sphot
