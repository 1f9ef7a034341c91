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
#include <span>
#include <string>
#include <vector>

#include "bizsurv/common/feature_table.hpp"
#include "bizsurv/common/matrix.hpp"

namespace bizsurv::learn {

// Labels are 1 for the positive class (Survived, or Positive sentiment)
// and 0 otherwise.
struct Dataset {
  std::vector<std::string> ids;
  std::vector<std::string> columns;
  Matrix X;
  std::vector<int> y;

  std::size_t rows() const { return ids.size(); }
  std::size_t width() const { return columns.size(); }
  std::size_t count(int label) const;

  Dataset subset(std::span<const std::size_t> rows) const;
  // Throws DataError on shape mismatch, non-binary labels or non-finite values.
  void validate() const;
};

std::uint64_t schema_fingerprint(const std::vector<std::string>& columns);

struct Split {
  Dataset train;
  Dataset test;
};

// Per class, round(n_c * test_fraction) rows go to the test fold (at least
// one and at most n_c - 1). Rows keep their original order within a fold.
Split stratified_split(const Dataset& data, double test_fraction, std::uint64_t seed);

// Row indices of the test fold for the same rule, for callers that split
// several aligned datasets identically.
std::vector<bool> stratified_test_mask(std::span<const int> labels, double test_fraction,
                                       std::uint64_t seed);

struct AssembleReport {
  std::map<std::string, std::size_t> dropped;  // per family: rows absent from the join
  std::size_t unlabeled = 0;
};

// Inner join of the tables on business id, restricted to labeled ids.
// Columns keep their table order; ids come out sorted.
Dataset assemble_dataset(const std::vector<const FeatureTable*>& tables,
                         const std::map<std::string, int>& labels, AssembleReport* report = nullptr);

// z-score scaling; zero-variance columns get scale 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Matrix& X);
  Matrix apply(const Matrix& X) const;
  void apply_row(std::span<const double> in, std::span<double> out) const;
  bool empty() const { return mean.empty(); }
};

}  // namespace bizsurv::learn
