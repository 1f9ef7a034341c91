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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bizsurv/common/matrix.hpp"
#include "bizsurv/learn/model.hpp"
#include "bizsurv/text/text.hpp"

namespace bizsurv::explain {

// Black box under explanation: positive-class probability for every row.
using ProbabilityFn = std::function<std::vector<double>(const Matrix&)>;

ProbabilityFn probability_fn(const learn::TrainedModel& model);

struct WeightedRidge {
  std::vector<double> coefficients;
  double intercept = 0.0;
  double r2 = 0.0;  // weighted coefficient of determination, clamped to [0, 1]
};

// Minimizes sum_i w_i (y_i - b - z_i . beta)^2 + alpha |beta|^2 with the
// intercept b unpenalized. A target without weighted variance gives r2 = 1.
WeightedRidge weighted_ridge(const Matrix& Z, std::span<const double> y, std::span<const double> weights,
                             double alpha);

enum class TabularMode {
  Quartile,    // binary "falls in the instance's bin" indicators
  Continuous,  // Gaussian samples, standardized values as regressors
};

struct TabularConfig {
  std::size_t top_k = 10;
  std::size_t num_samples = 5000;
  std::optional<double> kernel_width;  // default 0.75 * sqrt(#features)
  double ridge_alpha = 1.0;
  TabularMode mode = TabularMode::Quartile;
  std::uint64_t seed = 0;
  std::array<std::string, 2> class_names = {"dead", "survived"};
};

struct TabularEntry {
  std::string feature;
  std::string condition;
  double value = 0.0;  // the instance's raw value
  double weight = 0.0;
};

struct TabularExplanation {
  std::string instance_id;
  int predicted_class = 0;
  std::string predicted_label;
  double probability = 0.0;
  std::vector<TabularEntry> entries;  // by |weight|, descending
  double intercept = 0.0;
  double local_fit_r2 = 0.0;
  std::string mode;
  double kernel_width = 0.0;
  std::size_t num_samples = 0;
  double ridge_alpha = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> excluded_features;  // constant in the background

  nlohmann::json to_json() const;
};

// Quartile edges (linear interpolation) with duplicates removed.
std::vector<double> quartile_edges(std::vector<double> values);
std::size_t bin_of(std::span<const double> edges, double value);

TabularExplanation explain_tabular(const ProbabilityFn& model, std::span<const double> x,
                                   const std::string& instance_id, const std::vector<std::string>& columns,
                                   const Matrix& background, const TabularConfig& config = {});

TabularExplanation explain_tabular(const learn::TrainedModel& model, std::span<const double> x,
                                   const std::string& instance_id, const Matrix& background,
                                   const TabularConfig& config = {});

struct TextExplainConfig {
  std::size_t top_k = 10;
  std::size_t num_samples = 3000;
  double kernel_width = 25.0;  // on cosine distance scaled by 100
  double ridge_alpha = 1.0;
  std::uint64_t seed = 0;
  std::array<std::string, 2> class_names = {"dead", "survived"};
};

struct TextExplanation {
  std::string review_id;
  std::string source_text;
  int predicted_class = 0;
  std::string predicted_label;
  double probability = 0.0;
  std::vector<std::pair<std::string, double>> word_weights;  // by |weight|, descending
  double intercept = 0.0;
  double local_fit_r2 = 0.0;
  double kernel_width = 0.0;
  std::size_t num_samples = 0;
  double ridge_alpha = 0.0;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

// `model` scores bag-of-words rows laid out as `columns`; vocabulary term t
// lives in column text::bow_column(t) when present. Throws DataError
// ("unexplainable input") when the text has no in-vocabulary token.
TextExplanation explain_text(const ProbabilityFn& model, const std::vector<std::string>& columns,
                             std::string_view text, const std::string& review_id,
                             const TextExplainConfig& config = {});

TextExplanation explain_text(const learn::TrainedModel& model, std::string_view text,
                             const std::string& review_id, const TextExplainConfig& config = {});

inline constexpr double kSalienceFloor = 1e-6;

const std::vector<std::string>& render_formats();
// "json" or "html". Throws Error listing the supported formats otherwise.
std::string render_explanation(const TabularExplanation& e, std::string_view format);
std::string render_explanation(const TextExplanation& e, std::string_view format);

}  // namespace bizsurv::explain
