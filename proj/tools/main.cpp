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

// bizsurv command line: one subcommand per pipeline stage.
#include <CLI/CLI11.hpp>

#include <iostream>
#include <nlohmann/json.hpp>

#include "bizsurv/common/error.hpp"
#include "bizsurv/pipeline/config.hpp"
#include "bizsurv/pipeline/stages.hpp"

namespace {

using bizsurv::pipeline::Stage;
using nlohmann::json;

enum ExitCode { kOk = 0, kFailure = 1, kMissing = 2, kBadConfig = 3, kLocked = 4 };

// "a.b.c=value" -> {"a": {"b": {"c": value}}}; value is JSON when it parses, else a string.
void apply_set(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw bizsurv::ConfigError("--set", "expected path=value, got '" + assignment + "'");
  }
  const std::string path = assignment.substr(0, eq), raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  json* slot = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw bizsurv::ConfigError(path, "empty path component");
    if (dot == std::string::npos) {
      (*slot)[key] = value;
      break;
    }
    slot = &(*slot)[key];
    start = dot + 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bizsurv: restaurant survival prediction from location-based social network data"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_file, workdir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  bool show_version = false;
  app.add_option("--config", config_file, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "master seed");
  app.add_option("--workdir", workdir, "directory holding all artifacts");
  app.add_option("--set", sets, "override a config field, e.g. --set geo.radius_m=250");
  app.add_flag("--version", show_version, "print tool and manifest schema versions");
  app.footer(
      "Configuration precedence: defaults < --config < BIZSURV_* environment < flags.\n"
      "Environment variables name config paths in upper case with '.' as '_',\n"
      "e.g. BIZSURV_GEO_RADIUS_M=250 or BIZSURV_TRAIN_MODEL=MLP.\n"
      "Exit codes: 0 ok, 1 failure, 2 missing prerequisite, 3 invalid config, 4 workdir locked.");

  std::map<std::string, CLI::App*> subs;
  const std::map<std::string, std::string> help = {
      {"synth", "generate a synthetic observation/prediction snapshot pair"},
      {"ingest", "parse and normalize the two snapshots"},
      {"label", "derive Survived/Dead labels"},
      {"features", "compute geographic, mobility, attribute and text features"},
      {"train", "train the configured model on a stratified split"},
      {"evaluate", "score the held-out split (ROC, AUC)"},
      {"ablate", "run the feature-family ablation grid"},
      {"explain", "explain one prediction with a local surrogate"}};
  for (auto stage : bizsurv::pipeline::all_stages()) {
    const std::string name(bizsurv::pipeline::stage_name(stage));
    subs[name] = app.add_subcommand(name, help.at(name));
  }

  std::string observation, prediction, observation_end, prediction_end;
  subs["ingest"]->add_option("--observation", observation, "observation snapshot directory");
  subs["ingest"]->add_option("--prediction", prediction, "prediction snapshot directory");
  subs["ingest"]->add_option("--observation-end", observation_end, "observation period end (YYYY-MM-DD)");
  subs["ingest"]->add_option("--prediction-end", prediction_end, "prediction period end (YYYY-MM-DD)");

  bizsurv::pipeline::ExplainRequest request;
  std::string model_path;
  auto* ex = subs["explain"];
  ex->add_option("--business-id", request.business_id, "restaurant to explain");
  ex->add_option("--review-id", request.review_id, "review to explain (sentiment task)");
  ex->add_option("--model", model_path, "model file (default: <workdir>/model.bin)");
  ex->add_option("--features", request.features, "feature families the model uses, e.g. A or GUAL");
  ex->add_option("--top-k", request.top_k, "number of features to report");
  ex->add_option("--samples", request.samples, "perturbation samples");
  ex->add_option("--seed", request.seed, "explanation seed (default: derived from the master seed)");
  ex->add_option("--format", request.format, "json or html");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "bizsurv: " << e.what() << "\n";
    return kBadConfig;
  }
  if (show_version) {
    std::cout << bizsurv::pipeline::version_string() << "\n";
    return kOk;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kBadConfig;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  const Stage stage = *bizsurv::pipeline::parse_stage(name);
  if (!model_path.empty()) request.model = model_path;

  try {
    json overrides = json::object();
    for (const auto& s : sets) apply_set(overrides, s);
    if (seed) overrides["seed"] = *seed;
    if (!workdir.empty()) overrides["paths"]["workdir"] = workdir;
    if (!observation.empty()) overrides["paths"]["observation"] = observation;
    if (!prediction.empty()) overrides["paths"]["prediction"] = prediction;
    if (!observation_end.empty()) overrides["dates"]["observation_end"] = observation_end;
    if (!prediction_end.empty()) overrides["dates"]["prediction_end"] = prediction_end;
    std::optional<std::filesystem::path> file;
    if (!config_file.empty()) file = config_file;
    const auto config =
        bizsurv::pipeline::resolve_config(file, bizsurv::pipeline::process_environment(), overrides);

    const auto outcome = bizsurv::pipeline::run_stage(stage, config, request);
    for (const auto& m : outcome.messages) std::cout << m << "\n";
    if (!outcome.skipped) {
      for (const auto& o : outcome.outputs) std::cout << "wrote " << (config.workdir / o).string() << "\n";
    }
    return kOk;
  } catch (const bizsurv::MissingArtifactError& e) {
    std::cerr << "bizsurv " << name << ": " << e.what() << " (run the stage that produces it first)\n";
    return kMissing;
  } catch (const bizsurv::ConfigError& e) {
    std::cerr << "bizsurv " << name << ": invalid configuration at " << e.what() << "\n";
    return kBadConfig;
  } catch (const bizsurv::pipeline::LockedError& e) {
    std::cerr << "bizsurv " << name << ": " << e.what() << "\n";
    return kLocked;
  } catch (const std::exception& e) {
    std::cerr << "bizsurv " << name << ": " << e.what() << "\n";
    return kFailure;
  }
}
