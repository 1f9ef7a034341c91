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
#include <span>
#include <string>
#include <vector>

#include "bizsurv/common/matrix.hpp"
#include "bizsurv/common/rng.hpp"
#include "bizsurv/learn/dataset.hpp"

namespace bizsurv::learn {

struct SmoteResult {
  Matrix rows;
  // For synthetic row j: rows[j] = minority[seed[j]] + u[j] * (minority[neighbor[j]] - minority[seed[j]])
  std::vector<std::size_t> seed;
  std::vector<std::size_t> neighbor;
  std::vector<double> u;
  std::size_t k_used = 0;
  std::vector<std::string> warnings;
};

// Indices of the k nearest other rows of `points[i]` (Euclidean after
// dividing each column by `scale`), nearest first, ties by index.
std::vector<std::vector<std::size_t>> nearest_neighbors(const Matrix& points, std::size_t k,
                                                        std::span<const double> scale = {});

// Generates `count` synthetic rows from the minority sample. Seeds cycle
// through every minority row before any is reused; the remainder are drawn
// without replacement. When the sample has no more than k rows, k drops to
// size - 1 and a warning is recorded.
SmoteResult smote(const Matrix& minority, std::size_t k, std::size_t count, Rng& rng,
                  std::span<const double> scale = {});

// Synthetic rows needed so that minority / majority reaches `amount`.
std::size_t smote_count(std::size_t minority, std::size_t majority, double amount);

struct OversampledDataset {
  Dataset data;  // original rows followed by synthetic ones ("smote:<n>" ids)
  int minority_label = 0;
  SmoteResult synthetic;
  std::vector<std::size_t> minority_rows;  // row of each minority sample in the input
};

// SMOTE on a training fold. Neighbors are found on z-scored features; new
// rows are interpolated in the original feature space.
OversampledDataset oversample(const Dataset& train, double amount, std::size_t k, std::uint64_t seed);

}  // namespace bizsurv::learn
