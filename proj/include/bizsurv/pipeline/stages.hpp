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

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bizsurv/common/error.hpp"
#include "bizsurv/pipeline/config.hpp"

namespace bizsurv::pipeline {

enum class Stage { Synth, Ingest, Label, Features, Train, Evaluate, Ablate, Explain };

std::string_view stage_name(Stage stage);
std::optional<Stage> parse_stage(std::string_view name);
const std::vector<Stage>& all_stages();

// Artifact file names, relative to the workdir.
namespace artifact {
inline constexpr const char* kSynthTruth = "synth_truth.jsonl";
inline constexpr const char* kObservationDir = "snapshots/observation";
inline constexpr const char* kPredictionDir = "snapshots/prediction";
inline constexpr const char* kCorpusObservation = "corpus/observation";
inline constexpr const char* kCorpusPrediction = "corpus/prediction";
inline constexpr const char* kIngestReport = "ingest_report.json";
inline constexpr const char* kLabels = "labels.jsonl";
inline constexpr const char* kLabelReport = "label_report.json";
inline constexpr const char* kGeo = "geo_features.csv";
inline constexpr const char* kMobility = "mobility_features.csv";
inline constexpr const char* kTransitions = "transitions.jsonl";
inline constexpr const char* kAttributes = "attribute_features.csv";
inline constexpr const char* kAttributeSchema = "attribute_schema.json";
inline constexpr const char* kBow = "bow_features.csv";
inline constexpr const char* kVocabulary = "vocabulary.json";
inline constexpr const char* kPolarity = "review_polarity.jsonl";
inline constexpr const char* kExtremes = "extreme_reviews.jsonl";
inline constexpr const char* kFeatureReport = "feature_report.json";
inline constexpr const char* kModel = "model.bin";
inline constexpr const char* kSplit = "split.json";
inline constexpr const char* kTrainReport = "train_report.json";
inline constexpr const char* kEvalReport = "eval_report.json";
inline constexpr const char* kAblation = "ablation.csv";
inline constexpr const char* kAblationReport = "ablation_report.json";
inline constexpr const char* kExplanationDir = "explanations";
inline constexpr const char* kManifest = "manifest.json";
inline constexpr const char* kLock = ".bizsurv.lock";
}  // namespace artifact

// Feature table file for a family letter (G, U, A, L).
std::string family_artifact(const std::string& family);

struct ExplainRequest {
  std::string business_id;
  std::string review_id;  // sentiment models explain a single review
  std::optional<std::filesystem::path> model;
  std::optional<std::string> features;  // family letters, default: the trained families
  std::optional<std::size_t> top_k;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> format;
};

struct StageOutcome {
  bool skipped = false;  // inputs, config and outputs unchanged since the last run
  std::vector<std::string> outputs;
  std::vector<std::string> messages;
};

// Runs one stage in config.workdir under the workdir lock. Throws
// MissingArtifactError, ConfigError, DataError or Error.
StageOutcome run_stage(Stage stage, const RunConfig& config, const ExplainRequest& request = {});

// Exclusive per-workdir lock held for the lifetime of the object.
class WorkdirLock {
 public:
  explicit WorkdirLock(const std::filesystem::path& workdir);
  ~WorkdirLock();
  WorkdirLock(const WorkdirLock&) = delete;
  WorkdirLock& operator=(const WorkdirLock&) = delete;

 private:
  std::filesystem::path path_;
};

class LockedError : public Error {
 public:
  using Error::Error;
};

std::string version_string();

}  // namespace bizsurv::pipeline
