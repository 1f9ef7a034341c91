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

#include "bizsurv/corpus/snapshot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "bizsurv/common/error.hpp"
#include "bizsurv/common/io.hpp"

namespace bizsurv::corpus {
namespace fs = std::filesystem;
using nlohmann::json;

Snapshot::Snapshot(Date as_of, std::vector<BusinessRecord> businesses,
                   std::vector<ReviewRecord> reviews, std::vector<CheckinRecord> checkins,
                   std::vector<PhotoRecord> photos)
    : as_of_(as_of),
      businesses_(std::move(businesses)),
      reviews_(std::move(reviews)),
      checkins_(std::move(checkins)),
      photos_(std::move(photos)) {
  index_.reserve(businesses_.size());
  for (std::size_t i = 0; i < businesses_.size(); ++i) {
    if (!index_.emplace(businesses_[i].business_id, i).second) {
      throw DataError("duplicate business_id " + businesses_[i].business_id);
    }
  }
}

const BusinessRecord* Snapshot::find(std::string_view business_id) const {
  auto i = index_of(business_id);
  return i == npos ? nullptr : &businesses_[i];
}

std::size_t Snapshot::index_of(std::string_view business_id) const {
  auto it = index_.find(std::string(business_id));
  return it == index_.end() ? npos : it->second;
}

namespace {

constexpr std::size_t kMaxWarnings = 20;

json stats_json(const FileStats& s) {
  return json{{"lines", s.lines},
              {"loaded", s.loaded},
              {"malformed", s.malformed},
              {"invalid", s.invalid},
              {"after_as_of", s.after_as_of},
              {"duplicate", s.duplicate},
              {"unresolved_business", s.unresolved_business}};
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

const std::string* get_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) return nullptr;
  return it->get_ptr<const std::string*>();
}

class LineReader {
 public:
  LineReader(const fs::path& path, const char* label, FileStats& stats, ParseReport& report)
      : in_(path), label_(label), stats_(stats), report_(report) {}

  bool ok() const { return static_cast<bool>(in_); }

  // Next non-blank line parsed as a JSON object; malformed lines are counted
  // and skipped.
  bool next(json& out) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      ++stats_.lines;
      out = json::parse(line, nullptr, false);
      if (out.is_discarded() || !out.is_object()) {
        reject(stats_.malformed, "not a JSON object");
        continue;
      }
      return true;
    }
    return false;
  }

  void reject(std::size_t& counter, const std::string& why) {
    ++counter;
    if (report_.warnings.size() < kMaxWarnings) {
      report_.warnings.push_back(std::string(label_) + ":" + std::to_string(line_no_) + ": " + why);
    }
  }

 private:
  std::ifstream in_;
  const char* label_;
  FileStats& stats_;
  ParseReport& report_;
  std::size_t line_no_ = 0;
};

std::vector<std::string> parse_category_field(const json& j) {
  if (j.is_string()) return split_categories(j.get<std::string>());
  std::vector<std::string> out;
  if (j.is_array()) {
    for (const auto& c : j) {
      if (c.is_string()) out.push_back(trim(c.get<std::string>()));
    }
  }
  return out;
}

std::vector<BusinessRecord> read_businesses(const fs::path& path, ParseReport& report) {
  LineReader reader(path, "business.json", report.business, report);
  if (!reader.ok()) throw DataError("missing business file " + path.string());
  std::vector<BusinessRecord> out;
  std::unordered_set<std::string> seen;
  json j;
  while (reader.next(j)) {
    const auto* id = get_string(j, "business_id");
    auto lat = j.find("latitude");
    auto lon = j.find("longitude");
    if (!id || id->empty() || lat == j.end() || !lat->is_number() || lon == j.end() ||
        !lon->is_number()) {
      reader.reject(report.business.malformed, "missing business_id or coordinates");
      continue;
    }
    BusinessRecord b;
    b.business_id = *id;
    b.latitude = lat->get<double>();
    b.longitude = lon->get<double>();
    if (!(b.latitude >= -90.0 && b.latitude <= 90.0 && b.longitude >= -180.0 &&
          b.longitude <= 180.0)) {
      reader.reject(report.business.invalid, "coordinates out of range");
      continue;
    }
    if (const auto* name = get_string(j, "name")) b.name = *name;
    if (const auto* state = get_string(j, "state")) b.state = *state;
    if (auto it = j.find("categories"); it != j.end()) b.categories = parse_category_field(*it);
    if (auto it = j.find("is_open"); it != j.end()) {
      if (it->is_boolean()) b.is_open = it->get<bool>();
      else if (it->is_number()) b.is_open = it->get<double>() != 0.0;
    }
    if (auto it = j.find("attributes"); it != j.end() && it->is_object()) b.attributes = *it;
    if (auto it = j.find("review_count"); it != j.end() && it->is_number_integer()) {
      b.review_count = std::max(0, it->get<int>());
    }
    if (!seen.insert(b.business_id).second) {
      reader.reject(report.business.duplicate, "duplicate business_id " + b.business_id);
      continue;
    }
    ++report.business.loaded;
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<ReviewRecord> read_reviews(const fs::path& path, Timestamp end,
                                       const std::unordered_set<std::string>& ids,
                                       ParseReport& report) {
  std::vector<ReviewRecord> out;
  LineReader reader(path, "review.json", report.review, report);
  if (!reader.ok()) {
    report.warnings.push_back("review.json absent; snapshot has no reviews");
    return out;
  }
  json j;
  while (reader.next(j)) {
    const auto* rid = get_string(j, "review_id");
    const auto* bid = get_string(j, "business_id");
    const auto* uid = get_string(j, "user_id");
    const auto* date = get_string(j, "date");
    auto stars = j.find("stars");
    if (!rid || !bid || !uid || !date || stars == j.end() || !stars->is_number()) {
      reader.reject(report.review.malformed, "missing review field");
      continue;
    }
    auto ts = parse_timestamp(*date);
    if (!ts) {
      reader.reject(report.review.malformed, "unparseable date '" + *date + "'");
      continue;
    }
    double s = stars->get<double>();
    if (s != std::floor(s) || s < 1.0 || s > 5.0) {
      reader.reject(report.review.invalid, "stars out of range");
      continue;
    }
    if (*ts >= end) {
      ++report.review.after_as_of;
      continue;
    }
    ReviewRecord r{*rid, *bid, *uid, static_cast<int>(s), *ts, {}};
    if (const auto* text = get_string(j, "text")) r.text = *text;
    if (!ids.contains(r.business_id)) ++report.review.unresolved_business;
    ++report.review.loaded;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CheckinRecord> read_checkins(const fs::path& path, Timestamp end,
                                         const std::unordered_set<std::string>& ids,
                                         ParseReport& report) {
  std::vector<CheckinRecord> out;
  LineReader reader(path, "checkin.json", report.checkin, report);
  if (!reader.ok()) {
    report.warnings.push_back("checkin.json absent; snapshot has no check-ins");
    return out;
  }
  json j;
  while (reader.next(j)) {
    const auto* bid = get_string(j, "business_id");
    auto date = j.find("date");
    if (!bid || date == j.end() || !(date->is_string() || date->is_array())) {
      reader.reject(report.checkin.malformed, "missing check-in field");
      continue;
    }
    std::vector<std::string> stamps;
    if (date->is_string()) {
      stamps = split_categories(date->get<std::string>());
    } else {
      for (const auto& d : *date) {
        if (d.is_string()) stamps.push_back(d.get<std::string>());
      }
    }
    CheckinRecord c{*bid, {}};
    bool bad = false;
    for (const auto& s : stamps) {
      auto ts = parse_timestamp(s);
      if (!ts) {
        bad = true;
        break;
      }
      if (*ts >= end) {
        ++report.checkin.after_as_of;
        continue;
      }
      c.timestamps.push_back(*ts);
    }
    if (bad) {
      reader.reject(report.checkin.malformed, "unparseable check-in timestamp");
      continue;
    }
    std::sort(c.timestamps.begin(), c.timestamps.end());
    if (!ids.contains(c.business_id)) ++report.checkin.unresolved_business;
    ++report.checkin.loaded;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<PhotoRecord> read_photos(const fs::path& dir,
                                     const std::unordered_set<std::string>& ids,
                                     ParseReport& report) {
  std::vector<PhotoRecord> out;
  auto path = dir / "photo.json";
  if (!fs::exists(path)) path = dir / "photos.json";
  LineReader reader(path, "photo.json", report.photo, report);
  if (!reader.ok()) return out;
  json j;
  while (reader.next(j)) {
    const auto* pid = get_string(j, "photo_id");
    const auto* bid = get_string(j, "business_id");
    if (!pid || !bid) {
      reader.reject(report.photo.malformed, "missing photo field");
      continue;
    }
    if (!ids.contains(*bid)) ++report.photo.unresolved_business;
    ++report.photo.loaded;
    out.push_back({*pid, *bid});
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

json ParseReport::to_json() const {
  return json{{"business", stats_json(business)},
              {"review", stats_json(review)},
              {"checkin", stats_json(checkin)},
              {"photo", stats_json(photo)},
              {"warnings", warnings}};
}

std::vector<std::string> split_categories(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto pos = text.find(',', start);
    if (pos == std::string_view::npos) pos = text.size();
    auto item = trim(text.substr(start, pos - start));
    if (!item.empty()) out.push_back(std::move(item));
    start = pos + 1;
  }
  return out;
}

ParsedSnapshot parse_snapshot(const fs::path& dir, Date as_of) {
  ParseReport report;
  auto businesses = read_businesses(dir / "business.json", report);
  std::unordered_set<std::string> ids;
  for (const auto& b : businesses) ids.insert(b.business_id);
  const Timestamp end = end_of_day(as_of);
  auto reviews = read_reviews(dir / "review.json", end, ids, report);
  auto checkins = read_checkins(dir / "checkin.json", end, ids, report);
  auto photos = read_photos(dir, ids, report);
  return {Snapshot(as_of, std::move(businesses), std::move(reviews), std::move(checkins),
                   std::move(photos)),
          std::move(report)};
}

void write_snapshot(const Snapshot& snapshot, const fs::path& dir) {
  fs::create_directories(dir);
  std::string out;
  for (const auto& b : snapshot.businesses()) {
    nlohmann::ordered_json j;
    j["business_id"] = b.business_id;
    j["name"] = b.name;
    j["state"] = b.state;
    j["latitude"] = b.latitude;
    j["longitude"] = b.longitude;
    j["review_count"] = b.review_count;
    j["is_open"] = b.is_open ? 1 : 0;
    j["attributes"] = b.attributes;
    j["categories"] = b.categories.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(join(b.categories, ", "));
    out += j.dump();
    out += '\n';
  }
  write_file_atomic(dir / "business.json", out);

  out.clear();
  for (const auto& r : snapshot.reviews()) {
    nlohmann::ordered_json j;
    j["review_id"] = r.review_id;
    j["user_id"] = r.user_id;
    j["business_id"] = r.business_id;
    j["stars"] = r.stars;
    j["text"] = r.text;
    j["date"] = format_timestamp(r.timestamp);
    out += j.dump();
    out += '\n';
  }
  write_file_atomic(dir / "review.json", out);

  out.clear();
  for (const auto& c : snapshot.checkins()) {
    std::vector<std::string> stamps;
    stamps.reserve(c.timestamps.size());
    for (auto t : c.timestamps) stamps.push_back(format_timestamp(t));
    nlohmann::ordered_json j;
    j["business_id"] = c.business_id;
    j["date"] = join(stamps, ", ");
    out += j.dump();
    out += '\n';
  }
  write_file_atomic(dir / "checkin.json", out);

  out.clear();
  for (const auto& p : snapshot.photos()) {
    nlohmann::ordered_json j;
    j["photo_id"] = p.photo_id;
    j["business_id"] = p.business_id;
    out += j.dump();
    out += '\n';
  }
  write_file_atomic(dir / "photo.json", out);
}

bool is_restaurant(const BusinessRecord& business) {
  static constexpr std::string_view kRestaurants = "restaurants";
  return std::any_of(business.categories.begin(), business.categories.end(),
                     [](const std::string& c) {
                       return c.size() == kRestaurants.size() &&
                              std::equal(c.begin(), c.end(), kRestaurants.begin(),
                                         [](char a, char b) {
                                           return std::tolower(static_cast<unsigned char>(a)) == b;
                                         });
                     });
}

Snapshot filter_restaurants(const Snapshot& snapshot) {
  std::vector<BusinessRecord> businesses;
  std::unordered_set<std::string> keep;
  for (const auto& b : snapshot.businesses()) {
    if (is_restaurant(b)) {
      keep.insert(b.business_id);
      businesses.push_back(b);
    }
  }
  std::vector<ReviewRecord> reviews;
  for (const auto& r : snapshot.reviews()) {
    if (keep.contains(r.business_id)) reviews.push_back(r);
  }
  std::vector<CheckinRecord> checkins;
  for (const auto& c : snapshot.checkins()) {
    if (keep.contains(c.business_id)) checkins.push_back(c);
  }
  std::vector<PhotoRecord> photos;
  for (const auto& p : snapshot.photos()) {
    if (keep.contains(p.business_id)) photos.push_back(p);
  }
  return Snapshot(snapshot.as_of(), std::move(businesses), std::move(reviews),
                  std::move(checkins), std::move(photos));
}

}  // namespace bizsurv::corpus
