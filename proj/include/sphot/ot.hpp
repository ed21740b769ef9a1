// Copyright (c) 2026 The sphot authors.
// SPDX-License-Identifier: Apache-2.0
//
// Exact Kantorovich optimal transport between two discrete measures with a
// precomputed cost matrix, plus an optional entropic (Sinkhorn) backend.

#pragma once

#include <Eigen/Core>

#include "sphot/types.hpp"

namespace sphot {

/// Pairwise cosine-distance cost between unit rows: C_ij =
/// 1 - <source_i, target_j>, clamped to [0, 2].
Eigen::MatrixXd cost_matrix(const Eigen::MatrixXd& source_points,
                            const Eigen::MatrixXd& target_points);

inline Eigen::MatrixXd cost_matrix(const DiscreteMeasure& source,
                                   const DiscreteMeasure& target) {
  return cost_matrix(source.support, target.support);
}

struct OtResult {
  Eigen::MatrixXd coupling;     // n x m, nonnegative, marginals = weights
  Eigen::VectorXd dual_source;  // u, with u[0] fixed to 0
  Eigen::VectorXd dual_target;  // v
  double objective = 0.0;       // <C, P>
  int iterations = 0;           // simplex pivots performed
  bool converged = true;        // false when the iteration cap was hit
};

inline constexpr int kDefaultOtMaxIterations = 100000;

/// Exact solver for min <C, P> over couplings with the given marginals,
/// using a network simplex on the dense transportation problem. The returned
/// plan is a vertex of the transportation polytope (at most n+m-1 positive
/// entries). Weights within 1e-6 of the simplex are renormalized on entry;
/// anything further off throws InfeasibleWeights. If the pivot cap is hit the
/// current (feasible, possibly suboptimal) plan is returned with
/// converged = false.
OtResult solve_ot(const Eigen::VectorXd& source_weights,
                  const Eigen::VectorXd& target_weights,
                  const Eigen::MatrixXd& cost,
                  int max_iterations = kDefaultOtMaxIterations);

/// Entropically regularized transport via log-domain Sinkhorn iterations.
/// Marginals of the result are within 1e-6 of the inputs; the objective
/// upper-bounds the exact optimum and approaches it as epsilon_reg shrinks.
Eigen::MatrixXd solve_ot_entropic(const Eigen::VectorXd& source_weights,
                                  const Eigen::VectorXd& target_weights,
                                  const Eigen::MatrixXd& cost,
                                  double epsilon_reg,
                                  int max_iterations = 200000);

/// P / ||P||_1 over all entries. Throws ZeroCoupling when P has no mass.
Eigen::MatrixXd normalize_coupling(const Eigen::MatrixXd& coupling);

}  // namespace sphot
