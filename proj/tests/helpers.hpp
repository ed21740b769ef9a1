// Copyright (c) 2026 The sphot authors.
// SPDX-License-Identifier: Apache-2.0
//
// Shared test helpers: error-code assertions and small builders.

#pragma once

#include <doctest.h>

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "sphot/error.hpp"
#include "sphot/rng.hpp"
#include "sphot/types.hpp"

namespace testutil {

inline void check_error(sphot::ErrorCode expected,
                        const std::function<void()>& fn) {
  try {
    fn();
    FAIL_CHECK("expected an Error, none thrown");
  } catch (const sphot::Error& e) {
    CHECK_MESSAGE(e.code() == expected, "got code ", e.code_name(), ": ",
                  e.what());
  }
}

inline Eigen::VectorXd vec2(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return v;
}

inline Eigen::VectorXd vec3(double x, double y, double z) {
  Eigen::VectorXd v(3);
  v << x, y, z;
  return v;
}

/// Prototype set with labels l0, l1, ... and uniformly random unit rows.
inline sphot::PrototypeSet random_prototypes(int n, int d, sphot::Rng& rng,
                                             const std::string& stem = "l") {
  sphot::PrototypeSet set;
  set.vectors.resize(n, d);
  for (int i = 0; i < n; ++i) {
    set.labels.push_back(stem + std::to_string(i));
    set.vectors.row(i) = rng.unit_vector(d).transpose();
  }
  return set;
}

/// Embedding set with ids v0, v1, ... and uniformly random unit rows.
inline sphot::EmbeddingSet random_embeddings(int n, int d, sphot::Rng& rng,
                                             const std::string& stem = "v") {
  sphot::EmbeddingSet set;
  set.vectors.resize(n, d);
  for (int i = 0; i < n; ++i) {
    set.ids.push_back(stem + std::to_string(i));
    set.vectors.row(i) = rng.unit_vector(d).transpose();
  }
  return set;
}

}  // namespace testutil
