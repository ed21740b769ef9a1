// Copyright (c) 2026 The sphot authors.
// SPDX-License-Identifier: Apache-2.0
//
// Plain data carriers shared across the library. Rows of every matrix are
// points; labels/ids are kept in parallel string vectors.

#pragma once

#include <Eigen/Core>
#include <string>
#include <unordered_set>
#include <vector>

#include "sphot/error.hpp"
#include "sphot/geometry.hpp"

namespace sphot {

/// Weighted point set on the unit hypersphere. Weights live on the
/// probability simplex: nonnegative, summing to 1 within 1e-9.
struct DiscreteMeasure {
  Eigen::MatrixXd support;  // n x d, rows unit-norm
  Eigen::VectorXd weights;  // n, on the simplex

  Eigen::Index size() const { return support.rows(); }
  Eigen::Index dim() const { return support.cols(); }

  void validate() const {
    if (support.rows() < 1)
      throw Error(ErrorCode::EmptyInput, "DiscreteMeasure: empty support");
    if (weights.size() != support.rows())
      throw Error(ErrorCode::DimensionMismatch,
                  "DiscreteMeasure: weight/support size mismatch");
    if ((weights.array() < 0.0).any())
      throw Error(ErrorCode::InvalidArgument,
                  "DiscreteMeasure: negative weight");
    if (std::abs(weights.sum() - 1.0) > 1e-9)
      throw Error(ErrorCode::InvalidArgument,
                  "DiscreteMeasure: weights do not sum to 1");
    for (Eigen::Index i = 0; i < support.rows(); ++i)
      if (!is_unit_norm(support.row(i)))
        throw Error(ErrorCode::InvalidArgument,
                    "DiscreteMeasure: support row is not unit-norm");
  }
};

/// Id-keyed unit vectors for test items (one row per item).
struct EmbeddingSet {
  std::vector<std::string> ids;
  Eigen::MatrixXd vectors;  // |ids| x d

  Eigen::Index size() const { return vectors.rows(); }
  Eigen::Index dim() const { return vectors.cols(); }

  void validate() const {
    if (static_cast<Eigen::Index>(ids.size()) != vectors.rows())
      throw Error(ErrorCode::IdCountMismatch,
                  "EmbeddingSet: id count does not match row count");
    std::unordered_set<std::string> seen;
    for (const auto& id : ids)
      if (!seen.insert(id).second)
        throw Error(ErrorCode::InvalidArgument,
                    "EmbeddingSet: duplicate id '" + id + "'");
  }
};

/// Labeled unit vectors for classes (one row per label).
struct PrototypeSet {
  std::vector<std::string> labels;
  Eigen::MatrixXd vectors;  // |labels| x d

  Eigen::Index size() const { return vectors.rows(); }
  Eigen::Index dim() const { return vectors.cols(); }

  void validate() const {
    if (vectors.rows() == 0)
      throw Error(ErrorCode::EmptyPrototypeSet, "PrototypeSet: empty");
    if (static_cast<Eigen::Index>(labels.size()) != vectors.rows())
      throw Error(ErrorCode::IdCountMismatch,
                  "PrototypeSet: label count does not match row count");
    std::unordered_set<std::string> seen;
    for (const auto& label : labels)
      if (!seen.insert(label).second)
        throw Error(ErrorCode::InvalidArgument,
                    "PrototypeSet: duplicate label '" + label + "'");
    for (Eigen::Index i = 0; i < vectors.rows(); ++i)
      if (!is_unit_norm(vectors.row(i)))
        throw Error(ErrorCode::InvalidArgument,
                    "PrototypeSet: vector for '" + labels[i] +
                        "' is not unit-norm");
  }
};

/// Per-video object probabilities p(o | v); rows are videos, columns objects.
struct LikelihoodMatrix {
  std::vector<std::string> video_ids;
  std::vector<std::string> object_ids;
  Eigen::MatrixXd p;  // |video_ids| x |object_ids|, entries in [0, 1]

  void validate() const {
    if (static_cast<Eigen::Index>(video_ids.size()) != p.rows() ||
        static_cast<Eigen::Index>(object_ids.size()) != p.cols())
      throw Error(ErrorCode::IdCountMismatch,
                  "LikelihoodMatrix: id counts do not match grid shape");
    if (p.size() == 0)
      throw Error(ErrorCode::EmptyInput, "LikelihoodMatrix: empty grid");
    if ((p.array() < 0.0).any() || (p.array() > 1.0).any())
      throw Error(ErrorCode::InvalidArgument,
                  "LikelihoodMatrix: entry outside [0, 1]");
  }
};

/// Item x label score grid. Higher is better; argmax ties break by label
/// order (lowest column index wins).
struct ScoreMatrix {
  std::vector<std::string> item_ids;
  std::vector<std::string> labels;
  Eigen::MatrixXd scores;  // |item_ids| x |labels|

  Eigen::Index items() const { return scores.rows(); }
  Eigen::Index label_count() const { return scores.cols(); }

  void validate() const {
    if (static_cast<Eigen::Index>(item_ids.size()) != scores.rows() ||
        static_cast<Eigen::Index>(labels.size()) != scores.cols())
      throw Error(ErrorCode::IdCountMismatch,
                  "ScoreMatrix: id counts do not match grid shape");
    if (!scores.allFinite())
      throw Error(ErrorCode::InvalidArgument,
                  "ScoreMatrix: non-finite entry");
  }

  /// Argmax label index per item, ties broken by lowest label index.
  Eigen::Index predict(Eigen::Index item) const {
    Eigen::Index best = 0;
    scores.row(item).maxCoeff(&best);
    // maxCoeff returns the first maximal index for ties, which matches the
    // label-order rule because columns are in label order.
    return best;
  }
};

}  // namespace sphot
