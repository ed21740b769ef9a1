// Copyright (c) 2026 The sphot authors.
// SPDX-License-Identifier: Apache-2.0
//
// Batch CLI: synthesize benchmarks, cluster embeddings, transport
// prototypes, score items, fuse score sources, and evaluate predictions.
// Every subcommand is a pure function of (input files, config, seed) at
// the byte level of its outputs.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include "sphot/io.hpp"
#include "sphot/metrics.hpp"
#include "sphot/pipeline.hpp"
#include "sphot/synth.hpp"

namespace {

using namespace sphot;

struct CommonOpts {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config, "flat key=value config file");
  cmd->add_option("--seed", opts.seed, "seed override");
  cmd->add_option("--out", opts.out, "output directory")->required();
}

Settings settings_for(const CommonOpts& opts) {
  Settings s;
  if (!opts.config.empty()) s = load_settings(opts.config);
  if (opts.seed) {
    s.pipeline.seed = *opts.seed;
    s.synth.seed = *opts.seed;
  }
  return s;
}

std::string out_path(const CommonOpts& opts, const char* name) {
  std::error_code ec;
  std::filesystem::create_directories(opts.out, ec);
  if (ec)
    throw Error(ErrorCode::FileError,
                "cannot create output directory '" + opts.out + "'");
  return opts.out + "/" + name;
}

std::vector<std::string> cluster_ids(Eigen::Index k) {
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "c%04lld", static_cast<long long>(i));
    ids.push_back(buf);
  }
  return ids;
}

const char* norm_name(FusionNorm n) {
  switch (n) {
    case FusionNorm::MinMax: return "minmax";
    case FusionNorm::ZScore: return "zscore";
    case FusionNorm::None: return "none";
  }
  return "?";
}

int cmd_synth(const CommonOpts& opts) {
  const Settings s = settings_for(opts);
  const Scenario scenario = generate_scenario(s.synth);
  write_embeddings(scenario.items, out_path(opts, "items.emb"));
  write_prototypes(scenario.prototypes, out_path(opts, "prototypes.emb"));
  write_prototypes(scenario.class_centers, out_path(opts, "centers.emb"));
  write_truth(scenario.truth, out_path(opts, "truth.csv"));
  if (scenario.has_objects) {
    write_prototypes(scenario.object_prototypes,
                     out_path(opts, "objects.emb"));
    write_likelihoods(scenario.likelihoods,
                      out_path(opts, "likelihoods.csv"));
  }
  std::printf("synth: classes=%d items=%lld dim=%d objects=%d\n",
              s.synth.n_classes,
              static_cast<long long>(scenario.items.vectors.rows()),
              s.synth.dim,
              scenario.has_objects ? s.synth.n_objects : 0);
  return 0;
}

int cmd_cluster(const CommonOpts& opts, const std::string& items_path) {
  const Settings s = settings_for(opts);
  const EmbeddingSet items = read_embeddings(items_path);
  auto [measure, model] = build_video_measure(
      items, s.pipeline.k, s.pipeline.seed, s.pipeline.video_weighting);

  EmbeddingSet centers;
  centers.ids = cluster_ids(model.centers.rows());
  centers.vectors = model.centers;
  write_embeddings(centers, out_path(opts, "centers.emb"));

  std::string assignments = "item,cluster\n";
  for (std::size_t i = 0; i < items.ids.size(); ++i) {
    assignments += items.ids[i];
    assignments += ',';
    assignments += centers.ids[static_cast<std::size_t>(
        model.assignment[i])];
    assignments += '\n';
  }
  write_text(assignments, out_path(opts, "assignments.csv"));

  LabeledMatrix weights;
  weights.corner = "cluster";
  weights.row_ids = cluster_ids(measure.size());
  weights.col_ids = {"weight"};
  weights.values = measure.weights;
  write_matrix_csv(weights, out_path(opts, "measure.csv"));

  std::printf("cluster: k=%d iterations=%d objective=%.6f\n", model.k,
              model.iterations,
              model.objective_history.empty()
                  ? 0.0
                  : model.objective_history.back());
  return 0;
}

int cmd_transport_actions(const CommonOpts& opts,
                          const std::string& prototypes_path,
                          const std::string& items_path) {
  const Settings s = settings_for(opts);
  const PrototypeSet prototypes = read_prototypes(prototypes_path);
  const EmbeddingSet items = read_embeddings(items_path);
  const ActionTransportResult res =
      transport_action_prototypes(prototypes, items, s.pipeline);

  write_prototypes(res.transported, out_path(opts, "transported.emb"));
  write_prototypes(res.targets, out_path(opts, "targets.emb"));
  write_coupling(res.coupling, prototypes.labels,
                 cluster_ids(res.video_measure.size()),
                 out_path(opts, "coupling.csv"));

  std::printf(
      "transport-actions: k=%d lambda=%.6f ot_objective=%.6f "
      "ot_iterations=%d converged=%d\n",
      s.pipeline.k, s.pipeline.lambda, res.ot.objective, res.ot.iterations,
      res.ot.converged ? 1 : 0);
  return 0;
}

int cmd_transport_objects(const CommonOpts& opts,
                          const std::string& actions_path,
                          const std::string& objects_path,
                          const std::string& likelihoods_path) {
  const Settings s = settings_for(opts);
  const PrototypeSet actions = read_prototypes(actions_path);
  const PrototypeSet objects = read_prototypes(objects_path);
  const LikelihoodMatrix likelihoods = read_likelihoods(likelihoods_path);
  const ObjectTransportResult res = transport_object_prototypes(
      actions, objects, likelihoods, s.pipeline);

  write_prototypes(res.transported, out_path(opts, "transported.emb"));
  write_prototypes(res.targets, out_path(opts, "targets.emb"));
  write_coupling(res.coupling, actions.labels, res.kept_objects,
                 out_path(opts, "coupling.csv"));

  LabeledMatrix aw;
  aw.corner = "label";
  aw.row_ids = actions.labels;
  aw.col_ids = {"weight"};
  aw.values = res.action_weights;
  write_matrix_csv(aw, out_path(opts, "action_weights.csv"));

  LabeledMatrix ow;
  ow.corner = "object";
  ow.row_ids = res.kept_objects;
  ow.col_ids = {"weight"};
  ow.values = res.object_weights;
  write_matrix_csv(ow, out_path(opts, "object_weights.csv"));

  std::printf(
      "transport-objects: objects_kept=%zu lambda=%.6f ot_objective=%.6f "
      "ot_iterations=%d converged=%d\n",
      res.kept_objects.size(), s.pipeline.lambda, res.ot.objective,
      res.ot.iterations, res.ot.converged ? 1 : 0);
  return 0;
}

int cmd_infer_actions(const CommonOpts& opts, const std::string& items_path,
                      const std::string& prototypes_path) {
  const EmbeddingSet items = read_embeddings(items_path);
  const PrototypeSet prototypes = read_prototypes(prototypes_path);
  const ScoreMatrix scores = score_action(items, prototypes);
  write_scores(scores, out_path(opts, "scores.csv"));
  std::printf("infer-actions: items=%lld labels=%lld\n",
              static_cast<long long>(scores.items()),
              static_cast<long long>(scores.label_count()));
  return 0;
}

int cmd_infer_objects(const CommonOpts& opts,
                      const std::string& likelihoods_path,
                      const std::string& objects_path,
                      const std::string& actions_path,
                      const std::string& selection_path) {
  const Settings s = settings_for(opts);
  const LikelihoodMatrix likelihoods = read_likelihoods(likelihoods_path);
  const PrototypeSet objects = read_prototypes(objects_path);
  const PrototypeSet actions = read_prototypes(actions_path);
  PrototypeSet selection;
  const PrototypeSet* selection_ptr = nullptr;
  if (!selection_path.empty()) {
    selection = read_prototypes(selection_path);
    selection_ptr = &selection;
  }
  const ScoreMatrix scores = score_object(
      likelihoods, objects, actions, s.pipeline.top_objects, selection_ptr);
  write_scores(scores, out_path(opts, "scores.csv"));
  std::printf("infer-objects: items=%lld labels=%lld top_t=%d\n",
              static_cast<long long>(scores.items()),
              static_cast<long long>(scores.label_count()),
              s.pipeline.top_objects);
  return 0;
}

int cmd_fuse(const CommonOpts& opts, const std::string& action_scores_path,
             const std::string& object_scores_path) {
  const Settings s = settings_for(opts);
  const ScoreMatrix a = read_scores(action_scores_path);
  const ScoreMatrix o = read_scores(object_scores_path);
  const ScoreMatrix fused =
      fuse_scores(a, o, s.pipeline.epsilon_fusion, s.pipeline.fusion_norm);
  write_scores(fused, out_path(opts, "scores.csv"));
  std::printf("fuse: epsilon=%.6f norm=%s items=%lld\n",
              s.pipeline.epsilon_fusion, norm_name(s.pipeline.fusion_norm),
              static_cast<long long>(fused.items()));
  return 0;
}

int cmd_eval(const CommonOpts& opts, const std::string& scores_path,
             const std::string& truth_path) {
  const ScoreMatrix scores = read_scores(scores_path);
  const TruthMap truth = read_truth(truth_path);
  const EvalReport report = evaluate(scores, truth);
  write_text(serialize_report(report), out_path(opts, "report.txt"));
  write_text(confusion_csv(report), out_path(opts, "confusion.csv"));
  std::printf("eval: top1=%.6f top5=%.6f entropy=%.6f never=%.6f\n",
              report.top1, report.top5, report.selection_entropy,
              report.never_predicted_fraction());
  return 0;
}

int cmd_report(const CommonOpts& opts, const std::string& scores_path,
               const std::string& truth_path,
               const std::string& baseline_path) {
  const ScoreMatrix scores = read_scores(scores_path);
  const TruthMap truth = read_truth(truth_path);
  const EvalReport report = evaluate(scores, truth);

  std::string text = serialize_report(report);
  std::string confusion;
  if (!baseline_path.empty()) {
    const ScoreMatrix baseline = read_scores(baseline_path);
    const EvalReport base = evaluate(baseline, truth);
    char buf[512];
    std::snprintf(
        buf, sizeof(buf),
        "baseline_top1=%.6f\nbaseline_top5=%.6f\n"
        "baseline_selection_entropy=%.6f\n"
        "baseline_never_predicted_fraction=%.6f\n"
        "delta_top1=%.6f\ndelta_top5=%.6f\ndelta_selection_entropy=%.6f\n"
        "delta_never_predicted_fraction=%.6f\n",
        base.top1, base.top5, base.selection_entropy,
        base.never_predicted_fraction(), report.top1 - base.top1,
        report.top5 - base.top5,
        report.selection_entropy - base.selection_entropy,
        report.never_predicted_fraction() - base.never_predicted_fraction());
    text += buf;
    // Confusion columns sorted by how often the baseline selects each label.
    const std::vector<Eigen::Index> order =
        descending_selection_order(base.selection_counts);
    confusion = confusion_csv(report, &order);
  } else {
    confusion = confusion_csv(report);
  }
  write_text(text, out_path(opts, "report.txt"));
  write_text(confusion, out_path(opts, "confusion.csv"));
  std::printf("report: top1=%.6f top5=%.6f entropy=%.6f never=%.6f\n",
              report.top1, report.top5, report.selection_entropy,
              report.never_predicted_fraction());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "sphot: re-position zero-shot class prototypes on the unit "
      "hypersphere by optimal transport against the test distribution"};
  app.require_subcommand(1);

  CommonOpts synth_opts;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic benchmark");
  add_common(synth, synth_opts);

  CommonOpts cluster_opts;
  std::string cluster_items;
  CLI::App* cluster = app.add_subcommand("cluster", "spherical k-means clustering");
  cluster->add_option("--items", cluster_items, "embeddings to cluster")->required();
  add_common(cluster, cluster_opts);

  CommonOpts ta_opts;
  std::string ta_prototypes, ta_items;
  CLI::App* ta = app.add_subcommand(
      "transport-actions", "transport prototypes toward clustered items");
  ta->add_option("--prototypes", ta_prototypes, "action prototypes")->required();
  ta->add_option("--items", ta_items, "test item embeddings")->required();
  add_common(ta, ta_opts);

  CommonOpts to_opts;
  std::string to_actions, to_objects, to_likelihoods;
  CLI::App* to = app.add_subcommand(
      "transport-objects", "transport prototypes toward detected objects");
  to->add_option("--action-prototypes", to_actions, "action prototypes")->required();
  to->add_option("--object-prototypes", to_objects, "object prototypes")->required();
  to->add_option("--likelihoods", to_likelihoods, "object likelihood CSV")->required();
  add_common(to, to_opts);

  CommonOpts ia_opts;
  std::string ia_items, ia_prototypes;
  CLI::App* ia = app.add_subcommand(
      "infer-actions", "nearest-prototype scores for items");
  ia->add_option("--items", ia_items, "item embeddings")->required();
  ia->add_option("--prototypes", ia_prototypes, "prototypes to score against")->required();
  add_common(ia, ia_opts);

  CommonOpts io_opts;
  std::string io_likelihoods, io_objects, io_actions, io_selection;
  CLI::App* iobj = app.add_subcommand(
      "infer-objects", "object-likelihood scores for items");
  iobj->add_option("--likelihoods", io_likelihoods, "object likelihood CSV")->required();
  iobj->add_option("--object-prototypes", io_objects, "object prototypes")->required();
  iobj->add_option("--action-prototypes", io_actions, "action prototypes")->required();
  iobj->add_option("--selection-prototypes", io_selection,
                   "prototypes used only to pick each label's object set");
  add_common(iobj, io_opts);

  CommonOpts fuse_opts;
  std::string fuse_a, fuse_o;
  CLI::App* fuse = app.add_subcommand("fuse", "fuse two score matrices");
  fuse->add_option("--action-scores", fuse_a, "action score CSV")->required();
  fuse->add_option("--object-scores", fuse_o, "object score CSV")->required();
  add_common(fuse, fuse_opts);

  CommonOpts eval_opts;
  std::string eval_scores, eval_truth;
  CLI::App* eval = app.add_subcommand("eval", "evaluate a score matrix");
  eval->add_option("--scores", eval_scores, "score CSV")->required();
  eval->add_option("--truth", eval_truth, "ground-truth CSV")->required();
  add_common(eval, eval_opts);

  CommonOpts report_opts;
  std::string report_scores, report_truth, report_baseline;
  CLI::App* report = app.add_subcommand(
      "report", "evaluate and compare against a baseline score matrix");
  report->add_option("--scores", report_scores, "score CSV")->required();
  report->add_option("--truth", report_truth, "ground-truth CSV")->required();
  report->add_option("--baseline", report_baseline, "baseline score CSV");
  add_common(report, report_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::fprintf(stderr, "ERROR:InvalidArgument:%s\n", e.what());
    return 1;
  }

  try {
    if (app.got_subcommand(synth)) return cmd_synth(synth_opts);
    if (app.got_subcommand(cluster)) return cmd_cluster(cluster_opts, cluster_items);
    if (app.got_subcommand(ta))
      return cmd_transport_actions(ta_opts, ta_prototypes, ta_items);
    if (app.got_subcommand(to))
      return cmd_transport_objects(to_opts, to_actions, to_objects,
                                   to_likelihoods);
    if (app.got_subcommand(ia))
      return cmd_infer_actions(ia_opts, ia_items, ia_prototypes);
    if (app.got_subcommand(iobj))
      return cmd_infer_objects(io_opts, io_likelihoods, io_objects, io_actions,
                               io_selection);
    if (app.got_subcommand(fuse)) return cmd_fuse(fuse_opts, fuse_a, fuse_o);
    if (app.got_subcommand(eval))
      return cmd_eval(eval_opts, eval_scores, eval_truth);
    if (app.got_subcommand(report))
      return cmd_report(report_opts, report_scores, report_truth,
                        report_baseline);
  } catch (const sphot::Error& e) {
    std::fprintf(stderr, "ERROR:%s:%s\n", e.code_name(), e.what());
    return e.is_io() ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ERROR:Internal:%s\n", e.what());
    return 1;
  }
  return 1;
}
