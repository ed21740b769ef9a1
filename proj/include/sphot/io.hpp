// Copyright (c) 2026 The sphot authors.
// SPDX-License-Identifier: Apache-2.0
//
// File formats: EMB1 binary embeddings with an id sidecar, CSV matrices
// with 17-significant-digit payloads (they round-trip doubles exactly),
// ground-truth maps, and the flat key=value configuration file.

#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

#include "sphot/metrics.hpp"
#include "sphot/pipeline.hpp"
#include "sphot/synth.hpp"
#include "sphot/types.hpp"

namespace sphot {

/// Reads embeddings from `path` plus ids from `path + ".ids"` (one id per
/// line). Paths ending in ".csv" use the CSV layout `id,c0,...,c{d-1}`
/// with no sidecar. Rows off unit norm by more than 1e-6 are re-normalized;
/// deviations beyond 1e-4 also print a warning to stderr. Well-formed unit
/// payloads are kept bit-exact.
EmbeddingSet read_embeddings(const std::string& path);

/// Binary layout: magic "EMB1", u32 row count, u32 dimension, then
/// row-major little-endian f32 payload; ids go to `path + ".ids"`.
/// Paths ending in ".csv" switch to the CSV layout.
void write_embeddings(const EmbeddingSet& set, const std::string& path);

PrototypeSet read_prototypes(const std::string& path);
void write_prototypes(const PrototypeSet& set, const std::string& path);

/// Dense matrix CSV: header `<corner>,col0,...`, one row per row id,
/// values rendered with %.17g.
struct LabeledMatrix {
  std::string corner;
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
  Eigen::MatrixXd values;
};

LabeledMatrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const LabeledMatrix& m, const std::string& path);

ScoreMatrix read_scores(const std::string& path);
void write_scores(const ScoreMatrix& scores, const std::string& path);

LikelihoodMatrix read_likelihoods(const std::string& path);
void write_likelihoods(const LikelihoodMatrix& lik, const std::string& path);

/// Coupling CSV keyed by source labels (rows) and target ids (columns).
void write_coupling(const Eigen::MatrixXd& coupling,
                    const std::vector<std::string>& row_ids,
                    const std::vector<std::string>& col_ids,
                    const std::string& path);

/// Ground truth CSV: header `item,label`.
TruthMap read_truth(const std::string& path);
void write_truth(const TruthMap& truth, const std::string& path);

std::string read_text(const std::string& path);
void write_text(const std::string& text, const std::string& path);

/// Flat key=value file; '#' starts a comment line. Duplicate keys are
/// rejected.
using RawConfig = std::map<std::string, std::string>;
RawConfig read_config(const std::string& path);

/// Typed view over the configuration. Unknown keys are rejected so typos
/// fail loudly.
struct Settings {
  PipelineConfig pipeline;
  std::string filter_mode = "topn";  // "topn" or "tau"
  double tau = 0.05;
  int top_n_objects = 1000;
  SynthScenario synth;

  /// The filter selected by filter_mode, materialized for the pipeline.
  ObjectFilter object_filter() const;
};

Settings parse_settings(const RawConfig& raw);
Settings load_settings(const std::string& path);

}  // namespace sphot
