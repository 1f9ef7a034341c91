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

#include <nlohmann/json.hpp>

#include "bizsurv/corpus/snapshot.hpp"

namespace bizsurv::corpus {

enum class Survival { Dead = 0, Survived = 1 };

std::string_view to_string(Survival s);

struct LabeledRestaurant {
  std::string business_id;
  Survival label = Survival::Dead;
  Date observation_end{};
  Date prediction_end{};

  friend bool operator==(const LabeledRestaurant&, const LabeledRestaurant&) = default;
};

struct LabelReport {
  std::size_t restaurants_observed = 0;  // restaurants in the observation snapshot
  std::size_t excluded_closed = 0;       // closed at observation end
  std::size_t considered = 0;            // open at observation end
  std::size_t survived = 0;
  std::size_t dead = 0;
  std::size_t dead_closed = 0;    // present in prediction snapshot, is_open = false
  std::size_t dead_delisted = 0;  // absent from prediction snapshot

  nlohmann::json to_json() const;
};

struct Labeling {
  std::vector<LabeledRestaurant> labels;  // sorted by business_id
  LabelReport report;
};

// Open restaurants at observation end survive iff open again in the
// prediction snapshot. Delisted restaurants count as dead.
Labeling derive_labels(const Snapshot& observation, const Snapshot& prediction);

void write_labels_jsonl(const std::vector<LabeledRestaurant>& labels,
                        const std::filesystem::path& path);
std::vector<LabeledRestaurant> read_labels_jsonl(const std::filesystem::path& path);

}  // namespace bizsurv::corpus
