// Copyright 2026 The bizsurv Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>

#include "bizsurv/common/error.hpp"
#include "bizsurv/common/io.hpp"
#include "bizsurv/pipeline/config.hpp"
#include "bizsurv/pipeline/stages.hpp"
#include "../support/fixtures.hpp"

namespace bizsurv::pipeline {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string config_error_field(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

TEST(Config, DefaultsMatchReferenceConstants) {
  auto c = resolve_config(std::nullopt, {}, json());
  EXPECT_EQ(c.radius_m, 500.0);
  EXPECT_EQ(c.vocab_size, 1000u);
  EXPECT_EQ(c.explain.top_k, 10u);
  EXPECT_EQ(c.test_fraction, 0.2);
  EXPECT_TRUE(c.smote);
  EXPECT_EQ(c.families, (std::vector<std::string>{"G", "U", "A", "L"}));
  EXPECT_EQ(c.task, Task::Survival);
  EXPECT_NE(c.stage_seed("train"), c.stage_seed("features"));
}

TEST(Config, PrecedenceFileEnvironmentFlags) {
  testing::TempDir dir("cfg");
  write_file_atomic(dir.path() / "c.json", R"({"geo": {"radius_m": 300}, "seed": 5})");
  auto file_only = resolve_config(dir.path() / "c.json", {}, json());
  EXPECT_EQ(file_only.radius_m, 300.0);
  EXPECT_EQ(file_only.seed, 5u);
  auto env = resolve_config(dir.path() / "c.json", {{"BIZSURV_GEO_RADIUS_M", "250"}, {"HOME", "/x"}}, json());
  EXPECT_EQ(env.radius_m, 250.0);
  auto flags = resolve_config(dir.path() / "c.json", {{"BIZSURV_GEO_RADIUS_M", "250"}}, json{{"geo", {{"radius_m", 100}}}});
  EXPECT_EQ(flags.radius_m, 100.0);
  EXPECT_EQ(env_name("geo.radius_m"), "BIZSURV_GEO_RADIUS_M");
  auto families = resolve_config(std::nullopt, {{"BIZSURV_TRAIN_FAMILIES", "A,L"}}, json());
  EXPECT_EQ(families.families, (std::vector<std::string>{"A", "L"}));
}

TEST(Config, ErrorsNameTheFieldPath) {
  EXPECT_EQ(config_error_field([] { resolve_config(std::nullopt, {}, json{{"geo", {{"radius_m", -1}}}}); }),
            "geo.radius_m");
  EXPECT_EQ(config_error_field([] { resolve_config(std::nullopt, {}, json{{"geo", {{"radius", 1}}}}); }),
            "geo.radius");
  EXPECT_EQ(config_error_field([] { resolve_config(std::nullopt, {}, json{{"smote", {{"enabled", "yes"}}}}); }),
            "smote.enabled");
  EXPECT_EQ(config_error_field([] { resolve_config(std::nullopt, {{"BIZSURV_NOPE", "1"}}, json()); }),
            "BIZSURV_NOPE");
  EXPECT_EQ(config_error_field([] { resolve_config(std::nullopt, {{"BIZSURV_SEED", "abc"}}, json()); }), "seed");
  EXPECT_EQ(config_error_field([] { resolve_config(std::nullopt, {}, json{{"train", {{"model", "SVM"}}}}); }),
            "train.model");
  EXPECT_EQ(config_error_field(
                [] { resolve_config(std::nullopt, {}, json{{"dates", {{"prediction_end", "2016-01-01"}}}}); }),
            "dates.prediction_end");
}

TEST(Config, CoefficientsReplaceDefaults) {
  auto c = resolve_config(std::nullopt, {}, json{{"synth", {{"coefficients", {{"price_range", 2.0}}}}}});
  EXPECT_EQ(c.synth.signal.coefficients, (std::map<std::string, double>{{"price_range", 2.0}}));
  EXPECT_EQ(config_error_field([] {
              resolve_config(std::nullopt, {}, json{{"synth", {{"coefficients", {{"moon", 2.0}}}}}});
            }),
            "synth.coefficients.moon");
}

RunConfig small_config(const fs::path& workdir) {
  json o;
  o["paths"]["workdir"] = workdir.string();
  o["synth"]["restaurants"] = 200;
  o["synth"]["other_businesses"] = 80;
  o["synth"]["users"] = 150;
  o["models"]["gbdt"]["trees"] = 20;
  o["models"]["mlp"]["epochs"] = 5;
  return resolve_config(std::nullopt, {}, o);
}

TEST(Stages, MissingPrerequisiteIsNamed) {
  testing::TempDir dir("stages-missing");
  auto c = small_config(dir.path() / "w");
  try {
    run_stage(Stage::Train, c);
    FAIL() << "expected MissingArtifactError";
  } catch (const MissingArtifactError& e) {
    EXPECT_EQ(e.artifact(), "geo_features.csv");
  }
  try {
    run_stage(Stage::Ingest, c);
    FAIL() << "expected MissingArtifactError";
  } catch (const MissingArtifactError& e) {
    EXPECT_EQ(e.artifact(), "snapshots/observation/business.json");
  }
}

TEST(Stages, FullPipelineRerunsAreNoOps) {
  testing::TempDir dir("stages-full");
  auto c = small_config(dir.path() / "w");
  for (auto s : {Stage::Synth, Stage::Ingest, Stage::Label, Stage::Features, Stage::Train, Stage::Evaluate,
                 Stage::Ablate}) {
    auto out = run_stage(s, c);
    EXPECT_FALSE(out.skipped) << stage_name(s);
    EXPECT_FALSE(out.outputs.empty()) << stage_name(s);
  }
  const auto model_bytes = read_file(c.workdir / artifact::kModel);
  for (auto s : {Stage::Features, Stage::Train, Stage::Ablate}) EXPECT_TRUE(run_stage(s, c).skipped);

  auto manifest = json::parse(read_file(c.workdir / artifact::kManifest));
  EXPECT_EQ(manifest["schema_version"], kManifestSchemaVersion);
  const auto& train = manifest["stages"]["train"];
  EXPECT_EQ(train["seed"], c.stage_seed("train"));
  EXPECT_TRUE(train["inputs"].contains(artifact::kLabels));
  EXPECT_TRUE(train["outputs"].contains(artifact::kModel));
  EXPECT_FALSE(train["config"]["paths"].contains("workdir"));

  // A changed upstream artifact forces the downstream stage to run again.
  const auto labels = read_file(c.workdir / artifact::kLabels);
  write_file_atomic(c.workdir / artifact::kLabels, labels + "\n");
  EXPECT_FALSE(run_stage(Stage::Train, c).skipped);
  EXPECT_EQ(read_file(c.workdir / artifact::kModel), model_bytes);
  // A deleted output too.
  fs::remove(c.workdir / artifact::kAblation);
  EXPECT_FALSE(run_stage(Stage::Ablate, c).skipped);

  auto report = json::parse(read_file(c.workdir / artifact::kEvalReport));
  EXPECT_GE(report["auc"].get<double>(), 0.0);
  EXPECT_EQ(report["roc"].front()["threshold"], "inf");

  ExplainRequest req;
  req.business_id = json::parse(read_file(c.workdir / artifact::kSplit))["test"][0];
  req.format = "html";
  auto ex = run_stage(Stage::Explain, c, req);
  ASSERT_EQ(ex.outputs.size(), 2u);
  EXPECT_EQ(ex.outputs[0], "explanations/" + req.business_id + ".GUAL.explanation.json");
  req.format = "pdf";
  EXPECT_THROW(run_stage(Stage::Explain, c, req), ConfigError);
}

TEST(Stages, SentimentTask) {
  testing::TempDir dir("stages-sentiment");
  auto c = small_config(dir.path() / "w");
  for (auto s : {Stage::Synth, Stage::Ingest, Stage::Label, Stage::Features}) run_stage(s, c);
  json o = c.resolved;
  o["task"] = "sentiment";
  o["train"]["model"] = "LR";
  auto sc = config_from_json(o);
  run_stage(Stage::Train, sc);
  run_stage(Stage::Evaluate, sc);
  auto report = json::parse(read_file(c.workdir / artifact::kEvalReport));
  EXPECT_EQ(report["task"], "sentiment");
  EXPECT_GT(report["auc"].get<double>(), 0.95);
  const auto polarity = read_file(c.workdir / artifact::kPolarity);
  ExplainRequest req;
  req.review_id = json::parse(polarity.substr(0, polarity.find('\n')))["review_id"];
  auto ex = run_stage(Stage::Explain, sc, req);
  ASSERT_EQ(ex.outputs.size(), 1u);
  EXPECT_EQ(ex.outputs[0], "explanations/" + req.review_id + ".L.explanation.json");
}

TEST(Lock, HeldLockBlocksAndStaleLockIsReclaimed) {
  testing::TempDir dir("lock");
  {
    WorkdirLock held(dir.path());
    EXPECT_THROW(WorkdirLock second(dir.path()), LockedError);
  }
  EXPECT_FALSE(fs::exists(dir.path() / artifact::kLock));
  pid_t child = fork();
  if (child == 0) _exit(0);
  waitpid(child, nullptr, 0);
  write_file_atomic(dir.path() / artifact::kLock, std::to_string(child) + "\n");
  EXPECT_NO_THROW(WorkdirLock reclaimed(dir.path()));
}

#ifdef BIZSURV_CLI_PATH
struct CliResult {
  int code;
  std::string output;
};

CliResult cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + BIZSURV_CLI_PATH + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

TEST(Cli, VersionAndExitCodes) {
  testing::TempDir dir("cli");
  const std::string wd = "--workdir " + (dir.path() / "w").string();
  auto v = cli("--version");
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.output.find("manifest schema 1"), std::string::npos);

  auto missing = cli(wd + " train");
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.output.find("geo_features.csv"), std::string::npos);

  auto bad = cli(wd + " --set geo.radius_m=-5 features");
  EXPECT_EQ(bad.code, 3);
  EXPECT_NE(bad.output.find("geo.radius_m"), std::string::npos);

  auto env = cli(wd + " synth", "BIZSURV_SYNTH_RESTAURANTS=abc");
  EXPECT_EQ(env.code, 3);
  EXPECT_NE(env.output.find("synth.restaurants"), std::string::npos);

  auto unknown = cli(wd + " synth", "BIZSURV_NOT_A_FIELD=1");
  EXPECT_EQ(unknown.code, 3);

  write_file_atomic(dir.path() / "bad.json", "{\"text\": {\"vocab_size\": \"many\"}}");
  auto file = cli(wd + " --config " + (dir.path() / "bad.json").string() + " label");
  EXPECT_EQ(file.code, 3);
  EXPECT_NE(file.output.find("text.vocab_size"), std::string::npos);
}

TEST(Cli, PipelineProducesElevenAblationRows) {
  testing::TempDir dir("cli-run");
  const std::string wd = "--workdir " + (dir.path() / "w").string() +
                         " --set synth.restaurants=200 --set synth.users=150 --set models.gbdt.trees=20";
  for (const char* stage : {"synth", "ingest", "label", "features", "ablate"}) {
    auto r = cli(wd + " " + stage);
    ASSERT_EQ(r.code, 0) << stage << ": " << r.output;
  }
  auto again = cli(wd + " ablate");
  EXPECT_EQ(again.code, 0);
  EXPECT_NE(again.output.find("up to date"), std::string::npos);
  const auto csv = read_file(dir.path() / "w" / artifact::kAblation);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 12);

  write_file_atomic(dir.path() / "w" / artifact::kLock, std::to_string(getpid()) + "\n");
  auto locked = cli(wd + " label");
  EXPECT_EQ(locked.code, 4);
  fs::remove(dir.path() / "w" / artifact::kLock);
}
#endif

}  // namespace
}  // namespace bizsurv::pipeline
