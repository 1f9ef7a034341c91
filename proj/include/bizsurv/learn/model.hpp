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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "bizsurv/common/matrix.hpp"
#include "bizsurv/learn/dataset.hpp"

namespace bizsurv::learn {

enum class ModelKind { LR, GBDT, MLP };

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view name);

struct LrParams {
  double l2 = 1e-4;
  int max_iter = 300;
  double tolerance = 1e-6;  // on the gradient norm
};

struct GbdtParams {
  int trees = 100;
  int depth = 3;
  double learning_rate = 0.1;
  int max_bins = 255;
  double lambda = 1.0;  // L2 penalty on leaf values
  double min_child_hessian = 1e-3;
};

struct MlpParams {
  int hidden = 64;
  int epochs = 30;
  int batch_size = 32;
  double learning_rate = 0.01;
  double momentum = 0.9;
  double l2 = 1e-4;
};

struct HyperParams {
  LrParams lr;
  GbdtParams gbdt;
  MlpParams mlp;
};

nlohmann::json to_json(const HyperParams& h);

double sigmoid(double z);

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;

  double score(std::span<const double> x) const;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct Tree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const;
};

struct GbdtModel {
  double base_score = 0.0;
  std::vector<Tree> trees;
  std::vector<double> train_loss;  // mean log-loss after each round, round 0 = base

  double score(std::span<const double> x) const;
};

// One hidden ReLU layer and a sigmoid output unit. Parameters are stored
// flat: W1 (hidden x inputs, row-major), b1, w2, b2.
struct MlpNet {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::vector<double> params;

  MlpNet() = default;
  MlpNet(std::size_t inputs, std::size_t hidden);

  std::size_t param_count() const { return hidden * inputs + 2 * hidden + 1; }
  double score(std::span<const double> x) const;
  // Mean log-loss over the rows plus l2/2 * |weights|^2 (biases excluded);
  // fills `grad` when given.
  double loss(const Matrix& X, std::span<const int> y, double l2,
              std::vector<double>* grad = nullptr) const;
};

// Immutable result of training.
class TrainedModel {
 public:
  using Body = std::variant<LinearModel, GbdtModel, MlpNet>;

  TrainedModel(ModelKind kind, std::vector<std::string> columns, Standardizer standardizer, Body body,
               std::uint64_t seed);

  ModelKind kind() const { return kind_; }
  const std::vector<std::string>& columns() const { return columns_; }
  std::uint64_t fingerprint() const { return fingerprint_; }
  std::uint64_t seed() const { return seed_; }
  const Standardizer& standardizer() const { return standardizer_; }
  const Body& body() const { return body_; }

  // Probability of the positive class. Throws DataError unless the
  // dataset's columns match the training schema.
  std::vector<double> predict_proba(const Dataset& data) const;
  // Same, checking only the width.
  std::vector<double> predict_rows(const Matrix& X) const;
  double predict_one(std::span<const double> x) const;

  nlohmann::json to_json() const;
  static TrainedModel from_json(const nlohmann::json& j);

 private:
  ModelKind kind_;
  std::vector<std::string> columns_;
  std::uint64_t fingerprint_;
  Standardizer standardizer_;
  Body body_;
  std::uint64_t seed_;
};

// Training on a dataset containing a single class yields a model that
// predicts that class with probability >= 0.99.
TrainedModel train_classifier(ModelKind kind, const Dataset& train, const HyperParams& hyper,
                              std::uint64_t seed);

GbdtModel train_gbdt(const Matrix& X, std::span<const int> y, const GbdtParams& params);
LinearModel train_lr(const Matrix& Xs, std::span<const int> y, const LrParams& params);
MlpNet train_mlp(const Matrix& Xs, std::span<const int> y, const MlpParams& params, std::uint64_t seed);

// model.bin: "BSURVMDL", u32 format version, u64 payload length, CBOR payload.
inline constexpr std::uint32_t kModelFormatVersion = 1;
std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(std::string_view bytes);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace bizsurv::learn
