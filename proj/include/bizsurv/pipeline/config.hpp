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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bizsurv/corpus/synth.hpp"
#include "bizsurv/explain/explain.hpp"
#include "bizsurv/learn/model.hpp"
#include "bizsurv/mobility/mobility.hpp"
#include "bizsurv/text/text.hpp"

namespace bizsurv::pipeline {

inline constexpr int kManifestSchemaVersion = 1;
inline constexpr const char* kEnvPrefix = "BIZSURV_";

enum class Task { Survival, Sentiment };

struct ExplainSettings {
  std::size_t top_k = 10;
  std::size_t samples = 5000;
  std::size_t text_samples = 3000;
  std::optional<double> kernel_width;
  double text_kernel_width = 25.0;
  double ridge_alpha = 1.0;
  explain::TabularMode mode = explain::TabularMode::Quartile;
  std::string format = "json";
};

struct RunConfig {
  nlohmann::json resolved;  // the effective configuration, echoed into artifacts

  std::filesystem::path workdir;
  std::filesystem::path observation_dir;  // empty: the synth stage output
  std::filesystem::path prediction_dir;
  Date observation_end{};
  Date prediction_end{};
  std::uint64_t seed = 0;
  Task task = Task::Survival;

  corpus::SynthConfig synth;
  double radius_m = 500.0;
  mobility::MobilityConfig mobility;
  std::size_t vocab_size = 1000;
  text::PolarityMap polarity_map = text::PolarityMap::ThreeUp;

  double test_fraction = 0.2;
  bool smote = true;
  std::size_t smote_k = 5;
  double smote_amount = 1.0;
  learn::ModelKind model = learn::ModelKind::GBDT;
  std::vector<std::string> families;
  learn::HyperParams hyper;
  ExplainSettings explain;

  std::uint64_t stage_seed(std::string_view stage) const;
};

// Built-in defaults as a JSON document; every accepted key appears here.
nlohmann::json default_config_json();

// Environment variable that overrides a config path, e.g.
// "geo.radius_m" -> "BIZSURV_GEO_RADIUS_M".
std::string env_name(const std::string& dotted_path);

// Precedence, lowest first: defaults, config file, environment overrides,
// command line overrides (already in config-document shape).
// Throws ConfigError naming the offending field path.
RunConfig resolve_config(const std::optional<std::filesystem::path>& config_file,
                         const std::map<std::string, std::string>& environment,
                         const nlohmann::json& cli_overrides);

RunConfig config_from_json(const nlohmann::json& document);

// BIZSURV_* variables of the current process.
std::map<std::string, std::string> process_environment();

}  // namespace bizsurv::pipeline
