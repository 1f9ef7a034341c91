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
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "bizsurv/common/time.hpp"

namespace bizsurv::corpus {

struct BusinessRecord {
  std::string business_id;
  std::string name;
  double latitude = 0.0;
  double longitude = 0.0;
  std::vector<std::string> categories;
  bool is_open = false;
  // Yelp attribute map; null when the dump carries no attributes.
  nlohmann::json attributes;
  std::string state;
  int review_count = 0;
};

struct ReviewRecord {
  std::string review_id;
  std::string business_id;
  std::string user_id;
  int stars = 0;
  Timestamp timestamp{};
  std::string text;
};

struct CheckinRecord {
  std::string business_id;
  std::vector<Timestamp> timestamps;
};

struct PhotoRecord {
  std::string photo_id;
  std::string business_id;
};

// One dated LBSN dump. Immutable once constructed.
class Snapshot {
 public:
  Snapshot() = default;
  Snapshot(Date as_of, std::vector<BusinessRecord> businesses, std::vector<ReviewRecord> reviews,
           std::vector<CheckinRecord> checkins, std::vector<PhotoRecord> photos);

  Date as_of() const { return as_of_; }
  // Exclusive end instant of the snapshot period.
  Timestamp period_end() const { return end_of_day(as_of_); }

  const std::vector<BusinessRecord>& businesses() const { return businesses_; }
  const std::vector<ReviewRecord>& reviews() const { return reviews_; }
  const std::vector<CheckinRecord>& checkins() const { return checkins_; }
  const std::vector<PhotoRecord>& photos() const { return photos_; }

  const BusinessRecord* find(std::string_view business_id) const;
  // Position of the business in businesses(), or npos.
  std::size_t index_of(std::string_view business_id) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  Date as_of_{};
  std::vector<BusinessRecord> businesses_;
  std::vector<ReviewRecord> reviews_;
  std::vector<CheckinRecord> checkins_;
  std::vector<PhotoRecord> photos_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct FileStats {
  std::size_t lines = 0;
  std::size_t loaded = 0;
  std::size_t malformed = 0;         // not JSON, missing/mistyped fields
  std::size_t invalid = 0;           // parsed but violates a record invariant
  std::size_t after_as_of = 0;       // dated after the snapshot date
  std::size_t duplicate = 0;
  std::size_t unresolved_business = 0;  // kept, but business_id not in business file
};

struct ParseReport {
  FileStats business, review, checkin, photo;
  std::vector<std::string> warnings;  // first few problems, for humans

  nlohmann::json to_json() const;
};

struct ParsedSnapshot {
  Snapshot snapshot;
  ParseReport report;
};

// Reads business.json, review.json, checkin.json and photo.json (or
// photos.json) from `dir`. Only the business file is mandatory.
ParsedSnapshot parse_snapshot(const std::filesystem::path& dir, Date as_of);

// Writes the snapshot back out in the Yelp JSONL layout.
void write_snapshot(const Snapshot& snapshot, const std::filesystem::path& dir);

// Case-insensitive exact match of "Restaurants" in the category list.
bool is_restaurant(const BusinessRecord& business);

// Keeps restaurants and the reviews/check-ins/photos that reference them.
Snapshot filter_restaurants(const Snapshot& snapshot);

// Yelp stores categories as one comma separated string.
std::vector<std::string> split_categories(std::string_view text);

}  // namespace bizsurv::corpus
