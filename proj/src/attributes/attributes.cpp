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

#include "bizsurv/attributes/attributes.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

#include "bizsurv/common/manifests.hpp"

namespace bizsurv::attributes {
using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 9> kAmbience = {
    "romantic", "intimate", "classy", "hipster", "divey", "touristy", "trendy", "upscale", "casual"};
constexpr std::array<std::string_view, 7> kDietary = {"dairy-free", "gluten-free", "vegan", "kosher",
                                                      "halal",      "soy-free",    "vegetarian"};
constexpr std::array<std::string_view, 5> kParking = {"garage", "street", "validated", "lot", "valet"};
constexpr std::array<std::string_view, 3> kAlcohol = {"none", "beer_and_wine", "full_bar"};
constexpr std::array<std::string_view, 3> kAttire = {"casual", "dressy", "formal"};
constexpr std::array<std::string_view, 3> kWifi = {"no", "free", "paid"};

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string unquote(std::string s) {
  s = trim(s);
  if (s.size() >= 2 && (s[0] == 'u' || s[0] == 'U') && (s[1] == '\'' || s[1] == '"')) s.erase(0, 1);
  if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front()) {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

void note(EncodeReport* report, const std::string& attribute) {
  if (!report) return;
  ++report->unrecognized;
  ++report->by_attribute[attribute];
}

TriState to_tri(const std::string& v, EncodeReport* report, const std::string& attribute) {
  if (v.empty()) return TriState::Missing;
  auto lower = ascii_lower(v);
  if (lower == "true") return TriState::True;
  if (lower == "false") return TriState::False;
  note(report, attribute);
  return TriState::Missing;
}

template <std::size_t N>
int to_choice(const std::string& v, const std::array<std::string_view, N>& values,
              EncodeReport* report, const std::string& attribute) {
  if (v.empty()) return -1;
  auto lower = ascii_lower(v);
  for (std::size_t i = 0; i < N; ++i) {
    if (lower == values[i]) return static_cast<int>(i);
  }
  note(report, attribute);
  return -1;
}

double present(TriState t) { return t == TriState::Missing ? 0.0 : 1.0; }
double value(TriState t) { return t == TriState::True ? 1.0 : 0.0; }

const json* lookup(const json& attrs, const char* key) {
  if (!attrs.is_object()) return nullptr;
  auto it = attrs.find(key);
  return it == attrs.end() ? nullptr : &*it;
}

template <std::size_t N>
void encode_map(const json& attrs, const char* key, const std::array<std::string_view, N>& sub,
                std::array<TriState, N>& out, EncodeReport* report) {
  out.fill(TriState::Missing);
  const json* v = lookup(attrs, key);
  if (!v) return;
  auto parsed = parse_literal_dict(*v);
  if (parsed.empty() && !normalize_literal(*v).empty() && !v->is_object()) {
    note(report, key);
    return;
  }
  for (std::size_t i = 0; i < N; ++i) {
    auto it = parsed.find(std::string(sub[i]));
    if (it != parsed.end()) out[i] = to_tri(it->second, report, std::string(key) + "." + std::string(sub[i]));
  }
}

void push_tri(std::vector<AttributeColumn>& cols, const std::string& name, const std::string& source) {
  cols.push_back({name + ".present", "binary", source});
  cols.push_back({name + ".value", "binary", source});
}

template <std::size_t N>
void push_choice(std::vector<AttributeColumn>& cols, const std::string& name,
                 const std::array<std::string_view, N>& values, const std::string& source) {
  cols.push_back({name + ".missing", "binary", source});
  for (auto v : values) cols.push_back({name + "." + std::string(v), "binary", source});
}

template <std::size_t N>
void row_choice(std::vector<double>& row, int choice) {
  row.push_back(choice < 0 ? 1.0 : 0.0);
  for (std::size_t i = 0; i < N; ++i) row.push_back(choice == static_cast<int>(i) ? 1.0 : 0.0);
}

void row_tri(std::vector<double>& row, TriState t) {
  row.push_back(present(t));
  row.push_back(value(t));
}

}  // namespace

const std::array<std::string_view, 9>& ambience_keys() { return kAmbience; }
const std::array<std::string_view, 7>& dietary_keys() { return kDietary; }
const std::array<std::string_view, 5>& parking_keys() { return kParking; }
const std::array<std::string_view, 3>& alcohol_values() { return kAlcohol; }
const std::array<std::string_view, 3>& attire_values() { return kAttire; }
const std::array<std::string_view, 3>& wifi_values() { return kWifi; }

void EncodeReport::merge(const EncodeReport& other) {
  unrecognized += other.unrecognized;
  for (const auto& [k, v] : other.by_attribute) by_attribute[k] += v;
}

std::string normalize_literal(const json& value) {
  if (value.is_null()) return {};
  if (value.is_boolean()) return value.get<bool>() ? "True" : "False";
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  if (value.is_number()) {
    double d = value.get<double>();
    if (d == static_cast<long long>(d)) return std::to_string(static_cast<long long>(d));
    return value.dump();
  }
  if (!value.is_string()) return value.dump();
  auto s = unquote(value.get<std::string>());
  if (s == "None") return {};
  return s;
}

std::map<std::string, std::string> parse_literal_dict(const json& value) {
  std::map<std::string, std::string> out;
  if (value.is_object()) {
    for (const auto& [k, v] : value.items()) out[ascii_lower(k)] = normalize_literal(v);
    return out;
  }
  if (!value.is_string()) return out;
  auto s = trim(value.get<std::string>());
  if (s.size() < 2 || s.front() != '{' || s.back() != '}') return out;
  s = s.substr(1, s.size() - 2);
  // split on commas outside quotes and braces
  std::vector<std::string> items;
  std::string cur;
  int depth = 0;
  char quote = 0;
  for (char c : s) {
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      --depth;
    } else if (c == ',' && depth == 0) {
      items.push_back(cur);
      cur.clear();
      continue;
    }
    cur += c;
  }
  if (!trim(cur).empty()) items.push_back(cur);
  for (const auto& item : items) {
    auto colon = item.find(':');
    if (colon == std::string::npos) continue;
    auto key = unquote(item.substr(0, colon));
    auto val = unquote(item.substr(colon + 1));
    if (val == "None") val.clear();
    out[ascii_lower(key)] = val;
  }
  return out;
}

AttributeVector encode_attributes(const corpus::BusinessRecord& business, EncodeReport* report) {
  AttributeVector v;
  const json& a = business.attributes;
  v.review_count = business.review_count;

  if (const json* p = lookup(a, "RestaurantsPriceRange2")) {
    auto s = normalize_literal(*p);
    if (s.size() == 1 && s[0] >= '1' && s[0] <= '4') {
      v.price_range = s[0] - '0';
    } else if (!s.empty()) {
      note(report, "RestaurantsPriceRange2");
    }
  }
  encode_map(a, "Ambience", kAmbience, v.ambience, report);
  encode_map(a, "DietaryRestrictions", kDietary, v.dietary, report);
  encode_map(a, "BusinessParking", kParking, v.parking, report);

  auto scalar = [&](const char* key) {
    const json* p = lookup(a, key);
    return p ? normalize_literal(*p) : std::string();
  };
  v.alcohol = to_choice(scalar("Alcohol"), kAlcohol, report, "Alcohol");
  v.attire = to_choice(scalar("RestaurantsAttire"), kAttire, report, "RestaurantsAttire");
  v.wifi = to_choice(scalar("WiFi"), kWifi, report, "WiFi");
  v.good_for_kids = to_tri(scalar("GoodForKids"), report, "GoodForKids");
  v.dogs_allowed = to_tri(scalar("DogsAllowed"), report, "DogsAllowed");
  v.outdoor_seating = to_tri(scalar("OutdoorSeating"), report, "OutdoorSeating");
  v.bike_parking = to_tri(scalar("BikeParking"), report, "BikeParking");
  v.has_tv = to_tri(scalar("HasTV"), report, "HasTV");
  v.takes_reservations = to_tri(scalar("RestaurantsReservations"), report, "RestaurantsReservations");
  v.happy_hour = to_tri(scalar("HappyHour"), report, "HappyHour");
  return v;
}

const std::vector<AttributeColumn>& attribute_schema() {
  static const std::vector<AttributeColumn> cols = [] {
    std::vector<AttributeColumn> c;
    c.push_back({"price_range", "ordinal", "attributes.RestaurantsPriceRange2"});
    for (auto k : kAmbience) push_tri(c, "ambience." + std::string(k), "attributes.Ambience." + std::string(k));
    for (auto k : kDietary) {
      push_tri(c, "dietary." + std::string(k), "attributes.DietaryRestrictions." + std::string(k));
    }
    push_choice(c, "alcohol", kAlcohol, "attributes.Alcohol");
    push_tri(c, "good_for_kids", "attributes.GoodForKids");
    push_tri(c, "dogs_allowed", "attributes.DogsAllowed");
    push_choice(c, "attire", kAttire, "attributes.RestaurantsAttire");
    push_tri(c, "outdoor_seating", "attributes.OutdoorSeating");
    push_tri(c, "bike_parking", "attributes.BikeParking");
    for (auto k : kParking) push_tri(c, "parking." + std::string(k), "attributes.BusinessParking." + std::string(k));
    push_choice(c, "wifi", kWifi, "attributes.WiFi");
    push_tri(c, "has_tv", "attributes.HasTV");
    push_tri(c, "takes_reservations", "attributes.RestaurantsReservations");
    push_tri(c, "happy_hour", "attributes.HappyHour");
    c.push_back({"image_count", "count", "photo.json (records referencing the business)"});
    c.push_back({"review_count", "count", "review.json (records within the observation period)"});
    return c;
  }();
  return cols;
}

json attribute_schema_json() {
  json cols = json::array();
  for (const auto& c : attribute_schema()) {
    cols.push_back(json{{"name", c.name}, {"type", c.type}, {"source", c.source}});
  }
  return json{{"version", 1}, {"width", attribute_schema().size()}, {"columns", cols}};
}

std::vector<double> AttributeVector::to_row() const {
  std::vector<double> row;
  row.reserve(attribute_schema().size());
  row.push_back(price_range);
  for (auto t : ambience) row_tri(row, t);
  for (auto t : dietary) row_tri(row, t);
  row_choice<3>(row, alcohol);
  row_tri(row, good_for_kids);
  row_tri(row, dogs_allowed);
  row_choice<3>(row, attire);
  row_tri(row, outdoor_seating);
  row_tri(row, bike_parking);
  for (auto t : parking) row_tri(row, t);
  row_choice<3>(row, wifi);
  row_tri(row, has_tv);
  row_tri(row, takes_reservations);
  row_tri(row, happy_hour);
  row.push_back(image_count);
  row.push_back(review_count);
  return row;
}

EngagementCounts engagement_counts(const std::string& business_id, const corpus::Snapshot& snapshot,
                                   Timestamp window_end) {
  EngagementCounts c;
  for (const auto& p : snapshot.photos()) c.image_count += p.business_id == business_id ? 1 : 0;
  for (const auto& r : snapshot.reviews()) {
    c.review_count += (r.business_id == business_id && r.timestamp < window_end) ? 1 : 0;
  }
  return c;
}

AttributeResult compute_attribute_features(const corpus::Snapshot& snapshot,
                                           const std::vector<std::string>& restaurant_ids) {
  AttributeResult result;
  std::unordered_map<std::string_view, EngagementCounts> counts;
  const Timestamp end = snapshot.period_end();
  for (const auto& p : snapshot.photos()) ++counts[p.business_id].image_count;
  for (const auto& r : snapshot.reviews()) {
    if (r.timestamp < end) ++counts[r.business_id].review_count;
  }
  for (const auto& id : restaurant_ids) {
    const auto* b = snapshot.find(id);
    if (!b) continue;
    EncodeReport rep;
    auto v = encode_attributes(*b, &rep);
    result.report.merge(rep);
    auto it = counts.find(id);
    const EngagementCounts c = it == counts.end() ? EngagementCounts{} : it->second;
    v.image_count = c.image_count;
    v.review_count = c.review_count;
    result.vectors.emplace(id, v);
  }
  auto& table = result.table;
  table.family = "attributes";
  for (const auto& c : attribute_schema()) table.columns.push_back(c.name);
  table.values = Matrix(0, table.columns.size());
  for (const auto& [id, v] : result.vectors) {
    table.ids.push_back(id);
    table.values.append_row(v.to_row());
  }
  return result;
}

}  // namespace bizsurv::attributes
