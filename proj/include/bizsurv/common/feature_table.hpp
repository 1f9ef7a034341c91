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
#include <string>
#include <vector>

#include "bizsurv/common/matrix.hpp"

namespace bizsurv {

// One row per business, named numeric columns. The CSV form has a
// `business_id` column followed by `columns` in order.
struct FeatureTable {
  std::string family;
  std::vector<std::string> columns;
  std::vector<std::string> ids;
  Matrix values;

  std::size_t width() const { return columns.size(); }
};

void write_feature_csv(const FeatureTable& table, const std::filesystem::path& path);
FeatureTable read_feature_csv(const std::filesystem::path& path, std::string family);

}  // namespace bizsurv
