// Copyright (c) 2026 The sphot authors.
// SPDX-License-Identifier: Apache-2.0
//
// Core operations on the unit hypersphere S^{d-1}: normalization, cosine
// distance, spherical interpolation (slerp) and weighted Frechet means.
// All functions are pure and thread-safe.

#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "sphot/error.hpp"

namespace sphot {

// Unit-norm invariant tolerance shared across the library.
inline constexpr double kUnitNormTol = 1e-6;
inline constexpr double kZeroNormTol = 1e-12;

enum class SphereDistance {
  Cosine,  // d(a, b) = 1 - <a, b>
  Arc,     // d(a, b) = acos(<a, b>)
};

template <typename Derived>
bool is_unit_norm(const Eigen::MatrixBase<Derived>& v,
                  double tol = kUnitNormTol) {
  return std::abs(static_cast<double>(v.norm()) - 1.0) <= tol;
}

/// v / ||v||. Throws ZeroVector for degenerate input.
template <typename Derived>
Eigen::Vector<typename Derived::Scalar, Eigen::Dynamic> normalize(
    const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Scalar n = v.norm();
  if (static_cast<double>(n) < kZeroNormTol)
    throw Error(ErrorCode::ZeroVector, "normalize: input norm below 1e-12");
  return v / n;
}

/// 1 - <a, b> for unit vectors; clamped to the exact range [0, 2] so that
/// rounding at the endpoints cannot leak outside.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine_distance(
    const Eigen::MatrixBase<DerivedA>& a,
    const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.size() != b.size())
    throw Error(ErrorCode::DimensionMismatch,
                "cosine_distance: dimensions differ");
  const Scalar d = Scalar(1) - a.dot(b);
  return std::clamp(d, Scalar(0), Scalar(2));
}

/// Spherical interpolation along the geodesic between two unit vectors.
///
/// Convention: lambda = 1 returns `original` and lambda = 0 returns `target`
/// (an interpolation ratio of 1 keeps the original point). Those two
/// endpoints are returned bitwise so that identity paths stay exact. Nearly
/// coincident inputs (angle < 1e-7) also return `original`.
template <typename DerivedA, typename DerivedB>
Eigen::Vector<typename DerivedA::Scalar, Eigen::Dynamic> slerp(
    const Eigen::MatrixBase<DerivedA>& original,
    const Eigen::MatrixBase<DerivedB>& target, double lambda) {
  using Scalar = typename DerivedA::Scalar;
  using Vector = Eigen::Vector<Scalar, Eigen::Dynamic>;
  if (original.size() != target.size())
    throw Error(ErrorCode::DimensionMismatch, "slerp: dimensions differ");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "slerp: lambda outside [0, 1]");

  const double dot = static_cast<double>(original.dot(target));
  if (dot <= -1.0 + 1e-9)
    throw Error(ErrorCode::AntipodalPoints,
                "slerp: endpoints are antipodal, geodesic not unique");

  if (lambda == 1.0) return original;
  if (lambda == 0.0) return target;

  const double omega = std::acos(std::clamp(dot, -1.0, 1.0));
  if (omega < 1e-7) return original;

  const double sin_omega = std::sin(omega);
  const double w_orig = std::sin(lambda * omega) / sin_omega;
  const double w_target = std::sin((1.0 - lambda) * omega) / sin_omega;
  Vector out = Scalar(w_orig) * original + Scalar(w_target) * target;
  return normalize(out);
}

struct FrechetOptions {
  SphereDistance distance = SphereDistance::Cosine;
  double step = 0.5;
  double tol = 1e-10;
  int max_iter = 1000;
};

/// Sum_j w_j d(x_j, s)^2 for unit s; the objective minimized by frechet_mean.
template <typename Scalar>
Scalar frechet_objective(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& points,
    const Eigen::Vector<Scalar, Eigen::Dynamic>& weights,
    const Eigen::Vector<Scalar, Eigen::Dynamic>& s,
    SphereDistance distance = SphereDistance::Cosine) {
  Scalar total = 0;
  for (Eigen::Index j = 0; j < points.rows(); ++j) {
    const Scalar c = std::clamp<Scalar>(points.row(j).dot(s), Scalar(-1), Scalar(1));
    const Scalar d = distance == SphereDistance::Cosine ? Scalar(1) - c : std::acos(c);
    total += weights[j] * d * d;
  }
  return total;
}

/// Weighted Frechet mean on the unit sphere: argmin_s sum_j w_j d(x_j, s)^2.
///
/// Points are the rows of `points`. Solved by projected Riemannian gradient
/// descent initialized at the normalized weighted arithmetic mean; stops when
/// successive iterates differ by less than opts.tol in norm or after
/// opts.max_iter iterations. Weights are normalized internally, so the result
/// is invariant to positive rescaling.
template <typename Scalar>
Eigen::Vector<Scalar, Eigen::Dynamic> frechet_mean(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& points,
    const Eigen::Vector<Scalar, Eigen::Dynamic>& weights,
    const FrechetOptions& opts = {}) {
  using Vector = Eigen::Vector<Scalar, Eigen::Dynamic>;
  const Eigen::Index n = points.rows();
  if (n == 0)
    throw Error(ErrorCode::EmptyInput, "frechet_mean: no support points");
  if (weights.size() != n)
    throw Error(ErrorCode::DimensionMismatch,
                "frechet_mean: weight count does not match point count");
  if ((weights.array() < Scalar(0)).any())
    throw Error(ErrorCode::InvalidArgument, "frechet_mean: negative weight");
  const Scalar wsum = weights.sum();
  if (!(static_cast<double>(wsum) > 0.0))
    throw Error(ErrorCode::AllZeroWeights, "frechet_mean: all weights zero");
  const Vector w = weights / wsum;

  Vector mean = points.transpose() * w;
  if (static_cast<double>(mean.norm()) < kZeroNormTol)
    throw Error(ErrorCode::DegenerateSupport,
                "frechet_mean: weighted mean has near-zero norm");
  Vector s = mean / mean.norm();

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    Vector grad(s.size());
    if (opts.distance == SphereDistance::Cosine) {
      // F = sum w_j (1 - x_j.s)^2, grad = -2 sum w_j (1 - x_j.s) x_j
      const Vector residual = Vector::Ones(n) - points * s;
      grad = Scalar(-2) * (points.transpose() * w.cwiseProduct(residual));
    } else {
      // F = sum w_j theta_j^2, Riemannian grad = -2 sum w_j Log_s(x_j)
      Vector log_sum = Vector::Zero(s.size());
      for (Eigen::Index j = 0; j < n; ++j) {
        const Scalar c = std::clamp<Scalar>(points.row(j).dot(s), Scalar(-1), Scalar(1));
        const Scalar theta = std::acos(c);
        if (theta < Scalar(1e-12)) continue;
        const Scalar sin_theta = std::sin(theta);
        const Vector tangent =
            points.row(j).transpose() - c * s;  // (I - ss^T) x_j
        log_sum += w[j] * (theta / sin_theta) * tangent;
      }
      grad = Scalar(-2) * log_sum;
    }
    // Project onto the tangent space and retract by normalization.
    grad -= grad.dot(s) * s;
    Vector next = s - Scalar(opts.step) * grad;
    const Scalar nn = next.norm();
    if (static_cast<double>(nn) < kZeroNormTol)
      throw Error(ErrorCode::DegenerateSupport,
                  "frechet_mean: iterate collapsed to the origin");
    next /= nn;
    const Scalar delta = (next - s).norm();
    s = next;
    if (static_cast<double>(delta) < opts.tol) break;
  }
  return s;
}

}  // namespace sphot
