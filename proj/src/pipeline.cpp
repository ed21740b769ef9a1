// Copyright (c) 2026 The sphot authors.
// SPDX-License-Identifier: Apache-2.0

#include "sphot/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "sphot/geometry.hpp"

namespace sphot {

namespace {

std::unordered_map<std::string, Eigen::Index> index_by_name(
    const std::vector<std::string>& names) {
  std::unordered_map<std::string, Eigen::Index> out;
  out.reserve(names.size());
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(names.size()); ++i)
    out.emplace(names[static_cast<std::size_t>(i)], i);
  return out;
}

Eigen::VectorXd normalize_row(const Eigen::VectorXd& row) {
  const double total = row.sum();
  return row / total;
}

}  // namespace

PrototypeSet target_prototypes(const Eigen::MatrixXd& coupling,
                               const DiscreteMeasure& targets,
                               const std::vector<std::string>& labels,
                               SphereDistance distance) {
  if (coupling.cols() != targets.size())
    throw Error(ErrorCode::DimensionMismatch,
                "coupling has " + std::to_string(coupling.cols()) +
                    " columns for " + std::to_string(targets.size()) +
                    " target atoms");
  if (static_cast<std::size_t>(coupling.rows()) != labels.size())
    throw Error(ErrorCode::DimensionMismatch,
                "coupling has " + std::to_string(coupling.rows()) +
                    " rows for " + std::to_string(labels.size()) + " labels");
  if ((coupling.array() < 0.0).any())
    throw Error(ErrorCode::InvalidArgument, "coupling has negative mass");

  PrototypeSet out;
  out.labels = labels;
  out.vectors.resize(coupling.rows(), targets.dim());
  FrechetOptions opts;
  opts.distance = distance;
  for (Eigen::Index i = 0; i < coupling.rows(); ++i) {
    const Eigen::VectorXd row = coupling.row(i).transpose();
    Eigen::Index positive = 0;
    Eigen::Index last = -1;
    for (Eigen::Index j = 0; j < row.size(); ++j) {
      if (row[j] > 0.0) {
        ++positive;
        last = j;
      }
    }
    if (positive == 0)
      throw Error(ErrorCode::EmptyRow,
                  "coupling row " + std::to_string(i) + " carries no mass");
    if (positive == 1) {
      out.vectors.row(i) = targets.support.row(last);
      continue;
    }
    out.vectors.row(i) =
        frechet_mean(targets.support, normalize_row(row), opts).transpose();
  }
  return out;
}

namespace {

PrototypeSet interpolate(const PrototypeSet& original,
                         const PrototypeSet& target, double lambda) {
  PrototypeSet out;
  out.labels = original.labels;
  out.vectors.resize(original.vectors.rows(), original.vectors.cols());
  for (Eigen::Index i = 0; i < original.vectors.rows(); ++i) {
    out.vectors.row(i) =
        slerp(Eigen::VectorXd(original.vectors.row(i).transpose()),
              Eigen::VectorXd(target.vectors.row(i).transpose()), lambda)
            .transpose();
  }
  return out;
}

}  // namespace

ActionTransportResult transport_action_prototypes(
    const PrototypeSet& prototypes, const EmbeddingSet& videos,
    const PipelineConfig& config) {
  config.validate();
  prototypes.validate();
  videos.validate();
  if (prototypes.vectors.cols() != videos.vectors.cols())
    throw Error(ErrorCode::DimensionMismatch,
                "prototype and video dimensions differ");

  ActionTransportResult res;
  const DiscreteMeasure source = build_action_measure(prototypes);
  auto [video_measure, clusters] = build_video_measure(
      videos, config.k, config.seed, config.video_weighting);
  res.video_measure = std::move(video_measure);
  res.clusters = std::move(clusters);

  const Eigen::MatrixXd cost =
      cost_matrix(source.support, res.video_measure.support);
  res.ot = solve_ot(source.weights, res.video_measure.weights, cost);
  res.coupling = normalize_coupling(res.ot.coupling);
  res.targets = target_prototypes(res.coupling, res.video_measure,
                                  prototypes.labels, config.frechet_distance);
  res.transported = interpolate(prototypes, res.targets, config.lambda);
  return res;
}

ObjectTransportResult transport_object_prototypes(
    const PrototypeSet& action_prototypes,
    const PrototypeSet& object_prototypes,
    const LikelihoodMatrix& likelihoods, const PipelineConfig& config) {
  config.validate();
  action_prototypes.validate();
  object_prototypes.validate();
  likelihoods.validate();
  if (action_prototypes.vectors.cols() != object_prototypes.vectors.cols())
    throw Error(ErrorCode::DimensionMismatch,
                "action and object prototype dimensions differ");

  ObjectTransportResult res;
  res.kept_objects = filter_objects(likelihoods, config.object_filter);

  const auto object_index = index_by_name(object_prototypes.labels);
  PrototypeSet kept;
  kept.labels = res.kept_objects;
  kept.vectors.resize(static_cast<Eigen::Index>(res.kept_objects.size()),
                      object_prototypes.vectors.cols());
  for (std::size_t i = 0; i < res.kept_objects.size(); ++i) {
    const auto it = object_index.find(res.kept_objects[i]);
    if (it == object_index.end())
      throw Error(ErrorCode::IndexMismatch,
                  "no prototype for object '" + res.kept_objects[i] + "'");
    kept.vectors.row(static_cast<Eigen::Index>(i)) =
        object_prototypes.vectors.row(it->second);
  }

  res.object_weights =
      config.object_weighting == ObjectWeighting::Transductive
          ? object_weights(likelihoods, res.kept_objects)
          : Eigen::VectorXd::Constant(
                kept.size(), 1.0 / static_cast<double>(kept.size()));
  res.action_weights =
      config.action_weighting == ActionWeighting::Inverse
          ? action_weights_vs_objects(action_prototypes, kept)
          : Eigen::VectorXd::Constant(
                action_prototypes.size(),
                1.0 / static_cast<double>(action_prototypes.size()));

  DiscreteMeasure targets;
  targets.support = kept.vectors;
  targets.weights = res.object_weights;

  const Eigen::MatrixXd cost =
      cost_matrix(action_prototypes.vectors, targets.support);
  res.ot = solve_ot(res.action_weights, targets.weights, cost);
  res.coupling = normalize_coupling(res.ot.coupling);
  res.targets = target_prototypes(res.coupling, targets,
                                  action_prototypes.labels,
                                  config.frechet_distance);
  res.transported =
      interpolate(action_prototypes, res.targets, config.lambda);
  return res;
}

ScoreMatrix score_action(const EmbeddingSet& videos,
                         const PrototypeSet& prototypes) {
  videos.validate();
  prototypes.validate();
  if (videos.vectors.cols() != prototypes.vectors.cols())
    throw Error(ErrorCode::DimensionMismatch,
                "video and prototype dimensions differ");
  ScoreMatrix out;
  out.item_ids = videos.ids;
  out.labels = prototypes.labels;
  out.scores = videos.vectors * prototypes.vectors.transpose();
  return out;
}

ScoreMatrix score_object(const LikelihoodMatrix& likelihoods,
                         const PrototypeSet& object_prototypes,
                         const PrototypeSet& action_prototypes, int top_t,
                         const PrototypeSet* selection) {
  likelihoods.validate();
  object_prototypes.validate();
  action_prototypes.validate();
  if (object_prototypes.vectors.cols() != action_prototypes.vectors.cols())
    throw Error(ErrorCode::DimensionMismatch,
                "object and action prototype dimensions differ");
  if (selection != nullptr) {
    selection->validate();
    if (selection->labels != action_prototypes.labels)
      throw Error(ErrorCode::IndexMismatch,
                  "selection prototypes carry different labels");
    if (selection->vectors.cols() != object_prototypes.vectors.cols())
      throw Error(ErrorCode::DimensionMismatch,
                  "selection and object prototype dimensions differ");
  }
  const Eigen::Index n_objects = object_prototypes.size();
  if (top_t < 1)
    throw Error(ErrorCode::InvalidArgument, "top_t must be >= 1");
  if (top_t > n_objects)
    throw Error(ErrorCode::TTooLarge,
                "top_t " + std::to_string(top_t) + " exceeds " +
                    std::to_string(n_objects) + " objects");

  // Likelihood column for every object prototype, keyed by id.
  const auto column_index = index_by_name(likelihoods.object_ids);
  std::vector<Eigen::Index> column(static_cast<std::size_t>(n_objects));
  for (Eigen::Index o = 0; o < n_objects; ++o) {
    const auto it =
        column_index.find(object_prototypes.labels[static_cast<std::size_t>(o)]);
    if (it == column_index.end())
      throw Error(ErrorCode::IndexMismatch,
                  "no likelihood column for object '" +
                      object_prototypes.labels[static_cast<std::size_t>(o)] +
                      "'");
    column[static_cast<std::size_t>(o)] = it->second;
  }

  const PrototypeSet& pick = selection != nullptr ? *selection
                                                  : action_prototypes;
  // Per-label similarities: selection picks O_l, scoring weighs it.
  const Eigen::MatrixXd sim_score =
      object_prototypes.vectors * action_prototypes.vectors.transpose();
  const Eigen::MatrixXd sim_pick =
      selection != nullptr
          ? Eigen::MatrixXd(object_prototypes.vectors *
                            pick.vectors.transpose())
          : sim_score;

  ScoreMatrix out;
  out.item_ids = likelihoods.video_ids;
  out.labels = action_prototypes.labels;
  out.scores.setZero(likelihoods.p.rows(),
                     static_cast<Eigen::Index>(action_prototypes.size()));

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n_objects));
  for (Eigen::Index l = 0; l < action_prototypes.size(); ++l) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    // Top-T by similarity; ties resolved by ascending object id.
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) {
                const double sa = sim_pick(a, l);
                const double sb = sim_pick(b, l);
                if (sa != sb) return sa > sb;
                return object_prototypes.labels[static_cast<std::size_t>(a)] <
                       object_prototypes.labels[static_cast<std::size_t>(b)];
              });
    for (int t = 0; t < top_t; ++t) {
      const Eigen::Index o = order[static_cast<std::size_t>(t)];
      out.scores.col(l) +=
          likelihoods.p.col(column[static_cast<std::size_t>(o)]) *
          sim_score(o, l);
    }
  }
  return out;
}

namespace {

void normalize_scores(Eigen::MatrixXd& scores, FusionNorm norm) {
  switch (norm) {
    case FusionNorm::None:
      return;
    case FusionNorm::MinMax:
      for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        const double lo = scores.row(i).minCoeff();
        const double hi = scores.row(i).maxCoeff();
        if (hi - lo < 1e-300) {
          scores.row(i).setZero();
        } else {
          scores.row(i) = (scores.row(i).array() - lo) / (hi - lo);
        }
      }
      return;
    case FusionNorm::ZScore:
      for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        const double mean = scores.row(i).mean();
        const double var =
            (scores.row(i).array() - mean).square().sum() /
            static_cast<double>(scores.cols());
        const double sd = std::sqrt(var);
        if (sd < 1e-300) {
          scores.row(i).setZero();
        } else {
          scores.row(i) = (scores.row(i).array() - mean) / sd;
        }
      }
      return;
  }
}

}  // namespace

ScoreMatrix fuse_scores(const ScoreMatrix& action_scores,
                        const ScoreMatrix& object_scores, double epsilon,
                        FusionNorm norm) {
  action_scores.validate();
  object_scores.validate();
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "epsilon outside [0, 1]");
  if (action_scores.item_ids != object_scores.item_ids)
    throw Error(ErrorCode::IndexMismatch, "fused score items differ");
  if (action_scores.labels != object_scores.labels)
    throw Error(ErrorCode::IndexMismatch, "fused score labels differ");

  Eigen::MatrixXd a = action_scores.scores;
  Eigen::MatrixXd o = object_scores.scores;
  normalize_scores(a, norm);
  normalize_scores(o, norm);

  ScoreMatrix out;
  out.item_ids = action_scores.item_ids;
  out.labels = action_scores.labels;
  out.scores = epsilon * a + (1.0 - epsilon) * o;
  return out;
}

ScoreMatrix rerank_tubes(const ScoreMatrix& tube_scores,
                         const ScoreMatrix& video_scores,
                         const std::map<std::string, std::string>& tube_to_video) {
  tube_scores.validate();
  video_scores.validate();
  if (tube_scores.labels != video_scores.labels)
    throw Error(ErrorCode::IndexMismatch,
                "tube and video score labels differ");

  const auto video_index = index_by_name(video_scores.item_ids);
  ScoreMatrix out;
  out.item_ids = tube_scores.item_ids;
  out.labels = tube_scores.labels;
  out.scores = tube_scores.scores;
  for (Eigen::Index t = 0; t < out.scores.rows(); ++t) {
    const std::string& tube = tube_scores.item_ids[static_cast<std::size_t>(t)];
    const auto mapped = tube_to_video.find(tube);
    if (mapped == tube_to_video.end())
      throw Error(ErrorCode::UnmappedTube,
                  "tube '" + tube + "' has no enclosing video");
    const auto vi = video_index.find(mapped->second);
    if (vi == video_index.end())
      throw Error(ErrorCode::UnmappedTube,
                  "tube '" + tube + "' maps to unknown video '" +
                      mapped->second + "'");
    out.scores.row(t) += video_scores.scores.row(vi->second);
  }
  return out;
}

}  // namespace sphot
