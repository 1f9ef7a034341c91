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

#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace bizsurv::learn {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

struct EvalReport {
  double auc = 0.5;
  std::vector<RocPoint> roc;  // from (0,0) to (1,1)
  std::size_t positives = 0;
  std::size_t negatives = 0;
  nlohmann::json config;

  nlohmann::json to_json() const;
};

// Rank-statistic AUC with tied scores counted as one half. Throws
// DataError naming the missing class when only one class is present.
EvalReport roc_auc(std::span<const double> scores, std::span<const int> labels);

struct VoteResult {
  std::vector<int> labels;
  std::vector<double> scores;  // mean member probability
};

// Each member votes p >= 0.5; ties go to the side of the mean probability.
VoteResult majority_vote(const std::vector<std::vector<double>>& member_probabilities);

}  // namespace bizsurv::learn
