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

#include "bizsurv/geo/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bizsurv/common/error.hpp"

namespace bizsurv::geo {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::vector<std::size_t> neighbors_of(const SpatialIndex& index, std::size_t center, double radius_m) {
  auto found = index.within(index.points()[center], radius_m);
  found.erase(std::remove(found.begin(), found.end(), center), found.end());
  return found;
}

}  // namespace

double geo_distance(LatLon a, LatLon b) {
  const double phi1 = a.latitude * kDegToRad;
  const double phi2 = b.latitude * kDegToRad;
  const double dphi = phi2 - phi1;
  const double dlambda = (b.longitude - a.longitude) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

SpatialIndex::SpatialIndex(std::vector<LatLon> points, double cell_m) : points_(std::move(points)) {
  if (!(cell_m > 0)) throw Error("spatial index cell size must be positive");
  cell_deg_ = std::min(cell_m / kEarthRadiusM / kDegToRad, 90.0);
  lat_cells_ = static_cast<long>(std::ceil(180.0 / cell_deg_));
  lon_cells_ = static_cast<long>(std::ceil(360.0 / cell_deg_));
  for (std::size_t i = 0; i < points_.size(); ++i) {
    cells_[key(lat_cell(points_[i].latitude), lon_cell(points_[i].longitude))].push_back(i);
  }
}

long SpatialIndex::lat_cell(double lat) const {
  return std::clamp(static_cast<long>(std::floor((lat + 90.0) / cell_deg_)), 0L, lat_cells_ - 1);
}

long SpatialIndex::lon_cell(double lon) const {
  return std::clamp(static_cast<long>(std::floor((lon + 180.0) / cell_deg_)), 0L, lon_cells_ - 1);
}

std::vector<std::size_t> SpatialIndex::within(LatLon center, double radius_m) const {
  std::vector<std::size_t> out;
  const double angle = radius_m / kEarthRadiusM;  // radians
  const double dlat = angle / kDegToRad * (1.0 + 1e-9) + 1e-12;
  const double cos_lat = std::cos(center.latitude * kDegToRad);
  // Largest longitude offset of a point within `angle` of the center.
  double dlon = 360.0;
  if (angle < std::numbers::pi / 2 && std::sin(angle) < cos_lat) {
    dlon = std::asin(std::sin(angle) / cos_lat) / kDegToRad * (1.0 + 1e-9) + 1e-12;
  }
  const long lat_lo = lat_cell(center.latitude - dlat);
  const long lat_hi = lat_cell(center.latitude + dlat);
  long lon_lo = static_cast<long>(std::floor((center.longitude - dlon + 180.0) / cell_deg_));
  long lon_hi = static_cast<long>(std::floor((center.longitude + dlon + 180.0) / cell_deg_));
  if (dlon >= 180.0 || lon_hi - lon_lo + 1 >= lon_cells_) {
    lon_lo = 0;
    lon_hi = lon_cells_ - 1;
  }
  for (long la = lat_lo; la <= lat_hi; ++la) {
    for (long lo = lon_lo; lo <= lon_hi; ++lo) {
      const long wrapped = ((lo % lon_cells_) + lon_cells_) % lon_cells_;
      auto it = cells_.find(key(la, wrapped));
      if (it == cells_.end()) continue;
      for (auto i : it->second) {
        if (geo_distance(center, points_[i]) <= radius_m) out.push_back(i);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

NeighborhoodMap build_neighborhoods(const corpus::Snapshot& snapshot, double radius_m) {
  if (snapshot.businesses().empty()) throw DataError("snapshot has no businesses");
  std::vector<LatLon> points;
  points.reserve(snapshot.businesses().size());
  for (const auto& b : snapshot.businesses()) points.push_back({b.latitude, b.longitude});
  SpatialIndex index(std::move(points), radius_m);
  NeighborhoodMap out;
  for (std::size_t i = 0; i < snapshot.businesses().size(); ++i) {
    const auto& b = snapshot.businesses()[i];
    if (!corpus::is_restaurant(b)) continue;
    out.emplace(b.business_id, Neighborhood{b.business_id, i, neighbors_of(index, i, radius_m), radius_m});
  }
  return out;
}

Ratio competition(const Neighborhood& n, const corpus::Snapshot& s) {
  if (n.members.empty()) return {0.0, true};
  std::size_t restaurants = 0;
  for (auto m : n.members) restaurants += corpus::is_restaurant(s.businesses()[m]) ? 1 : 0;
  return {double(restaurants) / double(n.members.size()), false};
}

std::vector<std::size_t> cuisine_set(const corpus::BusinessRecord& b, const NameManifest& cuisines) {
  std::vector<std::size_t> out;
  for (const auto& c : b.categories) {
    if (auto i = cuisines.find(c)) out.push_back(*i);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Ratio specific_competition(const Neighborhood& n, const corpus::Snapshot& s,
                           std::span<const std::size_t> center_cuisines) {
  std::size_t restaurants = 0, same = 0;
  for (auto m : n.members) {
    const auto& b = s.businesses()[m];
    if (!corpus::is_restaurant(b)) continue;
    ++restaurants;
    auto theirs = cuisine_set(b);
    std::size_t i = 0, j = 0;
    while (i < theirs.size() && j < center_cuisines.size()) {
      if (theirs[i] == center_cuisines[j]) {
        ++same;
        break;
      }
      if (theirs[i] < center_cuisines[j]) ++i;
      else ++j;
    }
  }
  if (restaurants == 0) return {0.0, true};
  return {double(same) / double(restaurants), false};
}

CategoryProfile category_profiles(const Neighborhood& n, const corpus::Snapshot& s,
                                  const NameManifest& categories, const NameManifest& cuisines) {
  CategoryProfile p;
  p.categories.assign(categories.size(), 0);
  p.subcategories.assign(cuisines.size(), 0);
  for (auto m : n.members) {
    for (const auto& c : s.businesses()[m].categories) {
      if (auto i = categories.find(c)) {
        ++p.categories[*i];
      } else if (auto j = cuisines.find(c)) {
        ++p.subcategories[*j];
      } else {
        ++p.unknown;
      }
    }
  }
  return p;
}

double place_entropy(std::span<const int> counts) {
  double total = 0.0;
  for (int c : counts) total += c;
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (int c : counts) {
    if (c <= 0) continue;
    const double p = c / total;
    h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

std::vector<std::vector<double>> tfidf(const std::vector<std::vector<int>>& documents) {
  std::vector<std::vector<double>> out;
  if (documents.empty()) return out;
  const std::size_t terms = documents.front().size();
  std::vector<std::size_t> df(terms, 0);
  for (const auto& d : documents) {
    if (d.size() != terms) throw Error("tfidf: documents differ in width");
    for (std::size_t t = 0; t < terms; ++t) df[t] += d[t] > 0 ? 1 : 0;
  }
  const double n = double(documents.size());
  std::vector<double> idf(terms, 0.0);
  for (std::size_t t = 0; t < terms; ++t) {
    if (df[t] > 0) idf[t] = std::log(n / double(df[t]));
  }
  out.reserve(documents.size());
  for (const auto& d : documents) {
    std::vector<double> w(terms, 0.0);
    for (std::size_t t = 0; t < terms; ++t) w[t] = d[t] > 0 ? d[t] * idf[t] : 0.0;
    out.push_back(std::move(w));
  }
  return out;
}

std::map<std::string, Attractiveness> neighborhood_attractiveness(
    const std::map<std::string, CategoryProfile>& profiles) {
  std::vector<std::vector<int>> cats, subs;
  for (const auto& [id, p] : profiles) {
    cats.push_back(p.categories);
    subs.push_back(p.subcategories);
  }
  auto cat_w = tfidf(cats);
  auto sub_w = tfidf(subs);
  std::map<std::string, Attractiveness> out;
  std::size_t i = 0;
  for (const auto& [id, p] : profiles) {
    out.emplace(id, Attractiveness{std::move(cat_w[i]), std::move(sub_w[i])});
    ++i;
  }
  return out;
}

std::string slug(std::string_view name) {
  std::string out;
  bool pending = false;
  for (unsigned char c : name) {
    if (std::isalnum(c)) {
      if (pending && !out.empty()) out += '_';
      pending = false;
      out += static_cast<char>(std::tolower(c));
    } else {
      pending = true;
    }
  }
  return out;
}

std::vector<std::string> geo_columns() {
  const auto& cats = NameManifest::categories();
  const auto& subs = NameManifest::cuisines();
  std::vector<std::string> cols = {"competition", "specific_competition"};
  for (const auto& c : cats.names()) cols.push_back("cat_count." + slug(c));
  for (const auto& c : subs.names()) cols.push_back("subcat_count." + slug(c));
  cols.push_back("place_entropy");
  for (const auto& c : cats.names()) cols.push_back("nac." + slug(c));
  for (const auto& c : subs.names()) cols.push_back("nasc." + slug(c));
  cols.push_back("empty_neighborhood");
  cols.push_back("no_restaurant_neighbors");
  return cols;
}

GeoResult compute_geo_features(const corpus::Snapshot& snapshot,
                               const std::vector<std::string>& restaurant_ids, double radius_m) {
  if (snapshot.businesses().empty()) throw DataError("snapshot has no businesses");
  GeoResult result;
  std::vector<LatLon> points;
  points.reserve(snapshot.businesses().size());
  for (const auto& b : snapshot.businesses()) points.push_back({b.latitude, b.longitude});
  SpatialIndex index(std::move(points), radius_m);

  std::map<std::string, CategoryProfile> profiles;
  for (const auto& id : restaurant_ids) {
    const auto pos = snapshot.index_of(id);
    if (pos == corpus::Snapshot::npos) {
      ++result.report.missing_businesses;
      continue;
    }
    Neighborhood n{id, pos, neighbors_of(index, pos, radius_m), radius_m};
    GeoFeatures f;
    f.competition = competition(n, snapshot);
    f.specific_competition = specific_competition(n, snapshot, cuisine_set(snapshot.businesses()[pos]));
    f.profile = category_profiles(n, snapshot);
    f.place_entropy = place_entropy(f.profile.categories);
    f.empty_neighborhood = n.members.empty();
    ++result.report.restaurants;
    result.report.empty_neighborhoods += f.empty_neighborhood ? 1 : 0;
    result.report.no_restaurant_neighbors += f.specific_competition.missing ? 1 : 0;
    result.report.unknown_category_strings += f.profile.unknown;
    profiles.emplace(id, f.profile);
    result.features.emplace(id, std::move(f));
  }
  for (auto& [id, a] : neighborhood_attractiveness(profiles)) {
    result.features.at(id).attractiveness = std::move(a);
  }

  auto& table = result.table;
  table.family = "geography";
  table.columns = geo_columns();
  table.values = Matrix(0, table.columns.size());
  std::vector<double> row;
  for (const auto& [id, f] : result.features) {
    row.clear();
    row.push_back(f.competition.value);
    row.push_back(f.specific_competition.value);
    row.insert(row.end(), f.profile.categories.begin(), f.profile.categories.end());
    row.insert(row.end(), f.profile.subcategories.begin(), f.profile.subcategories.end());
    row.push_back(f.place_entropy);
    row.insert(row.end(), f.attractiveness.categories.begin(), f.attractiveness.categories.end());
    row.insert(row.end(), f.attractiveness.subcategories.begin(), f.attractiveness.subcategories.end());
    row.push_back(f.empty_neighborhood ? 1.0 : 0.0);
    row.push_back(f.specific_competition.missing ? 1.0 : 0.0);
    table.ids.push_back(id);
    table.values.append_row(row);
  }
  return result;
}

}  // namespace bizsurv::geo
