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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bizsurv/common/feature_table.hpp"
#include "bizsurv/corpus/snapshot.hpp"

namespace bizsurv::attributes {

enum class TriState { Missing, False, True };

struct AttributeVector {
  int price_range = 0;  // 1..4, 0 when absent
  std::array<TriState, 9> ambience{};
  std::array<TriState, 7> dietary{};
  int alcohol = -1;  // index into alcohol_values(), -1 when absent
  TriState good_for_kids = TriState::Missing;
  TriState dogs_allowed = TriState::Missing;
  int attire = -1;
  TriState outdoor_seating = TriState::Missing;
  TriState bike_parking = TriState::Missing;
  std::array<TriState, 5> parking{};
  int wifi = -1;
  TriState has_tv = TriState::Missing;
  TriState takes_reservations = TriState::Missing;
  TriState happy_hour = TriState::Missing;
  int image_count = 0;
  int review_count = 0;

  // Fixed-width numeric encoding in attribute_schema() order.
  std::vector<double> to_row() const;
};

const std::array<std::string_view, 9>& ambience_keys();
const std::array<std::string_view, 7>& dietary_keys();
const std::array<std::string_view, 5>& parking_keys();
const std::array<std::string_view, 3>& alcohol_values();
const std::array<std::string_view, 3>& attire_values();
const std::array<std::string_view, 3>& wifi_values();

struct AttributeColumn {
  std::string name;
  std::string type;    // "ordinal", "binary" or "count"
  std::string source;  // attribute path in the business record
};

const std::vector<AttributeColumn>& attribute_schema();
nlohmann::json attribute_schema_json();

struct EncodeReport {
  std::size_t unrecognized = 0;
  std::map<std::string, std::size_t> by_attribute;

  void merge(const EncodeReport& other);
};

// Normalized scalar form of a Yelp attribute value: strips the u'' / ''
// wrappers of Python string literals, maps "None" to empty.
std::string normalize_literal(const nlohmann::json& value);

// Parses a nested attribute map given either as a JSON object or as a
// Python dict literal ("{'garage': False, 'lot': True}").
std::map<std::string, std::string> parse_literal_dict(const nlohmann::json& value);

// Total over the business record; review_count is taken from the record
// until engagement counts replace it.
AttributeVector encode_attributes(const corpus::BusinessRecord& business,
                                  EncodeReport* report = nullptr);

struct EngagementCounts {
  int image_count = 0;
  int review_count = 0;
};

// Photos and reviews referencing the business, reviews restricted to
// timestamps before window_end.
EngagementCounts engagement_counts(const std::string& business_id, const corpus::Snapshot& snapshot,
                                   Timestamp window_end);

struct AttributeResult {
  std::map<std::string, AttributeVector> vectors;
  EncodeReport report;
  FeatureTable table;
};

AttributeResult compute_attribute_features(const corpus::Snapshot& snapshot,
                                           const std::vector<std::string>& restaurant_ids);

}  // namespace bizsurv::attributes
