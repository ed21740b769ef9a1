// Copyright (c) 2026 The sphot authors.
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end CLI checks: every subcommand is a pure function of its input
// files, config, and seed at the byte level of its outputs.

#include <doctest.h>

#include <sys/wait.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct TempDir {
  std::filesystem::path path;

  TempDir() {
    static std::atomic<int> counter{0};
    path = std::filesystem::temp_directory_path() /
           ("sphot_cli_test_" + std::to_string(counter++));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }

  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

int run_cli(const std::string& args, const std::string& stderr_path = "") {
  std::string cmd = std::string(SPHOT_CLI_PATH) + " " + args + " >/dev/null";
  cmd += stderr_path.empty() ? " 2>/dev/null" : (" 2>" + stderr_path);
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

/// Small benchmark config shared by the chain tests.
std::string write_base_config(const TempDir& dir, bool with_objects) {
  const std::string path = dir.file("run.cfg");
  std::string text =
      "k=4\n"
      "lambda=0.5\n"
      "seed=5\n"
      "top_t=5\n"
      "epsilon=0.5\n"
      "synth_classes=6\n"
      "synth_items=8\n"
      "synth_dim=8\n"
      "synth_kappa=50\n"
      "synth_bias=0.6\n";
  if (with_objects)
    text +=
        "synth_objects=true\n"
        "synth_object_count=10\n";
  spit(path, text);
  return path;
}

}  // namespace

TEST_CASE("synth writes a complete, byte-deterministic benchmark") {
  TempDir dir;
  const std::string config = write_base_config(dir, false);
  const std::string out_a = dir.file("a");
  const std::string out_b = dir.file("b");
  CHECK(run_cli("synth --config " + config + " --out " + out_a) == 0);
  CHECK(run_cli("synth --config " + config + " --out " + out_b) == 0);

  for (const char* name : {"items.emb", "items.emb.ids", "prototypes.emb",
                           "prototypes.emb.ids", "centers.emb", "truth.csv"}) {
    CAPTURE(name);
    const std::string in_a = out_a + "/" + name;
    CHECK(std::filesystem::exists(in_a));
    CHECK(slurp(in_a) == slurp(out_b + "/" + name));
  }

  const std::string out_c = dir.file("c");
  CHECK(run_cli("synth --config " + config + " --seed 6 --out " + out_c) ==
        0);
  CHECK(slurp(out_a + "/items.emb") != slurp(out_c + "/items.emb"));
}

TEST_CASE("action chain: synth, transport, infer, report all succeed") {
  TempDir dir;
  const std::string config = write_base_config(dir, false);
  const std::string bench = dir.file("bench");
  REQUIRE(run_cli("synth --config " + config + " --out " + bench) == 0);

  const std::string transported = dir.file("transport");
  REQUIRE(run_cli("transport-actions --config " + config + " --prototypes " +
                  bench + "/prototypes.emb --items " + bench +
                  "/items.emb --out " + transported) == 0);
  CHECK(std::filesystem::exists(transported + "/transported.emb"));
  CHECK(std::filesystem::exists(transported + "/targets.emb"));
  CHECK(std::filesystem::exists(transported + "/coupling.csv"));

  // The transport stage itself is byte-deterministic.
  const std::string transported2 = dir.file("transport2");
  REQUIRE(run_cli("transport-actions --config " + config + " --prototypes " +
                  bench + "/prototypes.emb --items " + bench +
                  "/items.emb --out " + transported2) == 0);
  CHECK(slurp(transported + "/coupling.csv") ==
        slurp(transported2 + "/coupling.csv"));
  CHECK(slurp(transported + "/transported.emb") ==
        slurp(transported2 + "/transported.emb"));

  const std::string base_scores = dir.file("scores_base");
  REQUIRE(run_cli("infer-actions --items " + bench + "/items.emb" +
                  " --prototypes " + bench + "/prototypes.emb --out " +
                  base_scores) == 0);
  const std::string post_scores = dir.file("scores_post");
  REQUIRE(run_cli("infer-actions --items " + bench + "/items.emb" +
                  " --prototypes " + transported + "/transported.emb --out " +
                  post_scores) == 0);

  const std::string eval_out = dir.file("eval");
  REQUIRE(run_cli("eval --scores " + post_scores + "/scores.csv --truth " +
                  bench + "/truth.csv --out " + eval_out) == 0);
  CHECK(slurp(eval_out + "/report.txt").find("top1=") != std::string::npos);
  CHECK(slurp(eval_out + "/confusion.csv").rfind("label,", 0) == 0);

  const std::string report_out = dir.file("report");
  REQUIRE(run_cli("report --scores " + post_scores + "/scores.csv --truth " +
                  bench + "/truth.csv --baseline " + base_scores +
                  "/scores.csv --out " + report_out) == 0);
  const std::string report = slurp(report_out + "/report.txt");
  CHECK(report.find("baseline_top1=") != std::string::npos);
  CHECK(report.find("delta_top1=") != std::string::npos);
  CHECK(report.find("delta_selection_entropy=") != std::string::npos);
  CHECK(report.find("delta_never_predicted_fraction=") != std::string::npos);
}

TEST_CASE("object chain: transport, infer, fuse all succeed") {
  TempDir dir;
  const std::string config = write_base_config(dir, true);
  const std::string bench = dir.file("bench");
  REQUIRE(run_cli("synth --config " + config + " --out " + bench) == 0);
  REQUIRE(std::filesystem::exists(bench + "/objects.emb"));
  REQUIRE(std::filesystem::exists(bench + "/likelihoods.csv"));

  const std::string transported = dir.file("transport");
  REQUIRE(run_cli("transport-objects --config " + config +
                  " --action-prototypes " + bench + "/prototypes.emb" +
                  " --object-prototypes " + bench + "/objects.emb" +
                  " --likelihoods " + bench + "/likelihoods.csv --out " +
                  transported) == 0);
  CHECK(std::filesystem::exists(transported + "/transported.emb"));
  CHECK(std::filesystem::exists(transported + "/action_weights.csv"));
  CHECK(std::filesystem::exists(transported + "/object_weights.csv"));

  const std::string object_scores = dir.file("scores_object");
  REQUIRE(run_cli("infer-objects --config " + config + " --likelihoods " +
                  bench + "/likelihoods.csv --object-prototypes " + bench +
                  "/objects.emb --action-prototypes " + transported +
                  "/transported.emb --selection-prototypes " + bench +
                  "/prototypes.emb --out " + object_scores) == 0);

  const std::string action_scores = dir.file("scores_action");
  REQUIRE(run_cli("infer-actions --items " + bench + "/items.emb" +
                  " --prototypes " + transported + "/transported.emb" +
                  " --out " + action_scores) == 0);

  const std::string fused = dir.file("fused");
  REQUIRE(run_cli("fuse --config " + config + " --action-scores " +
                  action_scores + "/scores.csv --object-scores " +
                  object_scores + "/scores.csv --out " + fused) == 0);

  const std::string eval_out = dir.file("eval");
  CHECK(run_cli("eval --scores " + fused + "/scores.csv --truth " + bench +
                "/truth.csv --out " + eval_out) == 0);
}

TEST_CASE("failures exit with coded diagnostics") {
  TempDir dir;

  const std::string bad_config = dir.file("bad.cfg");
  spit(bad_config, "not_a_key=1\n");
  const std::string err1 = dir.file("err1.txt");
  CHECK(run_cli("synth --config " + bad_config + " --out " + dir.file("o1"),
                err1) == 1);
  CHECK(slurp(err1).rfind("ERROR:InvalidConfig:", 0) == 0);

  const std::string err2 = dir.file("err2.txt");
  CHECK(run_cli("infer-actions --items " + dir.file("absent.emb") +
                " --prototypes " + dir.file("absent2.emb") + " --out " +
                dir.file("o2"),
                err2) == 2);
  CHECK(slurp(err2).rfind("ERROR:FileError:", 0) == 0);

  const std::string err3 = dir.file("err3.txt");
  CHECK(run_cli("transport-actions --items x.emb --out " + dir.file("o3"),
                err3) == 1);
  CHECK(slurp(err3).rfind("ERROR:InvalidArgument:", 0) == 0);

  // Infeasible separation surfaces as a non-IO failure (exit 1).
  const std::string tight = dir.file("tight.cfg");
  spit(tight,
       "synth_classes=20\nsynth_items=5\nsynth_dim=3\nsynth_bias=0.6\n");
  const std::string err4 = dir.file("err4.txt");
  CHECK(run_cli("synth --config " + tight + " --out " + dir.file("o4"),
                err4) == 1);
  CHECK(slurp(err4).rfind("ERROR:InfeasibleSeparation:", 0) == 0);
}
