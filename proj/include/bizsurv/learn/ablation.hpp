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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bizsurv/common/feature_table.hpp"
#include "bizsurv/learn/model.hpp"

namespace bizsurv::learn {

struct AblationConfig {
  double test_fraction = 0.2;
  bool smote = true;
  double smote_amount = 1.0;
  std::size_t smote_k = 5;
  HyperParams hyper;
};

// Feature families by their one-letter code: G geography, U user mobility,
// A attributes, L linguistic.
struct AblationRow {
  std::string name;
  std::vector<std::string> families;
  std::optional<double> gbdt_auc;
  std::optional<double> mlp_auc;
};

struct AblationResult {
  std::vector<AblationRow> rows;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::vector<std::string> warnings;

  std::string to_csv() const;
  const AblationRow* find(const std::string& name) const;
};

// The eleven feature-set rows G, U, A, L, GU, ALL, -GU, -G, -U, -A, -L.
const std::vector<std::pair<std::string, std::vector<std::string>>>& ablation_rows();

// Trains GBDT and MLP per family on one shared stratified split of the ids
// present in every table; multi-family rows are equal-weight vote ensembles
// of the per-family models. Rows whose families are all missing are skipped.
AblationResult run_ablation(const std::map<std::string, const FeatureTable*>& tables,
                            const std::map<std::string, int>& labels, const AblationConfig& config,
                            std::uint64_t seed);

}  // namespace bizsurv::learn
