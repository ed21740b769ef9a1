// Copyright (c) 2026 The sphot authors.
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic benchmark generator: von Mises-Fisher class clusters with
// well-separated centers and prototypes rotated away from the data by a
// controllable bias angle, so a nearest-prototype baseline exhibits a
// recoverable misalignment.

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sphot/rng.hpp"
#include "sphot/types.hpp"

namespace sphot {

struct SynthScenario {
  int n_classes = 20;
  int n_items_per_class = 50;
  int dim = 16;
  double kappa = 50.0;       // vMF concentration
  double bias_angle = 0.6;   // radians between class center and prototype
  std::uint64_t seed = 0;
  // Exponential class-size decay factor in (0, 1]; 0 keeps classes balanced.
  double imbalance = 0.0;
  bool with_objects = false;
  int n_objects = 64;
  double likelihood_noise = 0.05;

  void validate() const;
};

struct Scenario {
  EmbeddingSet items;
  PrototypeSet prototypes;     // rotated: what the classifier is handed
  PrototypeSet class_centers;  // true vMF centers
  std::map<std::string, std::string> truth;
  std::vector<int> per_class_counts;
  bool has_objects = false;
  PrototypeSet object_prototypes;
  LikelihoodMatrix likelihoods;
};

/// von Mises-Fisher samples on S^{d-1} (rows), via the standard rejection
/// scheme for the radial component and a Gaussian tangent direction.
Eigen::MatrixXd sample_vmf(const Eigen::VectorXd& center, double kappa,
                           int count, Rng& rng);
Eigen::MatrixXd sample_vmf(const Eigen::VectorXd& center, double kappa,
                           int count, std::uint64_t seed);

/// First-fit class centers drawn from a polar band whose depth tracks the
/// bias angle (InfeasibleSeparation when the bias-scaled separation floor
/// cannot be met within 10,000 candidates), vMF items per class, prototypes
/// rotated by bias_angle in a per-class random 2-plane, and an optional
/// object-likelihood matrix from item-object similarity plus noise.
Scenario generate_scenario(const SynthScenario& s);

}  // namespace sphot
