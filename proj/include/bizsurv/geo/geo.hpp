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
#include <unordered_map>
#include <vector>

#include "bizsurv/common/feature_table.hpp"
#include "bizsurv/common/manifests.hpp"
#include "bizsurv/corpus/snapshot.hpp"

namespace bizsurv::geo {

inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kDefaultRadiusM = 500.0;

struct LatLon {
  double latitude = 0.0;
  double longitude = 0.0;
};

// Haversine great-circle distance in meters.
double geo_distance(LatLon a, LatLon b);

// Fixed-angle lat/lon grid. Radius queries visit only cells that can hold
// points within the radius, then filter by exact haversine distance.
class SpatialIndex {
 public:
  SpatialIndex(std::vector<LatLon> points, double cell_m);

  // Indices of points within radius_m (inclusive) of center, ascending.
  std::vector<std::size_t> within(LatLon center, double radius_m) const;

  const std::vector<LatLon>& points() const { return points_; }

 private:
  std::int64_t key(long lat_cell, long lon_cell) const { return lat_cell * lon_cells_ + lon_cell; }
  long lat_cell(double lat) const;
  long lon_cell(double lon) const;

  std::vector<LatLon> points_;
  double cell_deg_;
  long lat_cells_;
  long lon_cells_;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> cells_;
};

struct Neighborhood {
  std::string center_id;
  std::size_t center_index = 0;         // position in the snapshot's business list
  std::vector<std::size_t> members;     // snapshot positions, ascending, center excluded
  double radius_m = kDefaultRadiusM;
};

using NeighborhoodMap = std::map<std::string, Neighborhood>;

// Neighborhoods of every restaurant over all businesses in the snapshot.
NeighborhoodMap build_neighborhoods(const corpus::Snapshot& snapshot,
                                    double radius_m = kDefaultRadiusM);

// A ratio feature plus its missingness flag.
struct Ratio {
  double value = 0.0;
  bool missing = false;
};

Ratio competition(const Neighborhood& n, const corpus::Snapshot& s);

// Cuisine manifest positions of a business's categories, ascending.
std::vector<std::size_t> cuisine_set(const corpus::BusinessRecord& b,
                                     const NameManifest& cuisines = NameManifest::cuisines());

// Share of restaurant members that share at least one cuisine with the center.
Ratio specific_competition(const Neighborhood& n, const corpus::Snapshot& s,
                           std::span<const std::size_t> center_cuisines);

struct CategoryProfile {
  std::vector<int> categories;     // one bin per top-level category
  std::vector<int> subcategories;  // one bin per cuisine
  std::size_t unknown = 0;         // category strings in neither manifest
};

CategoryProfile category_profiles(const Neighborhood& n, const corpus::Snapshot& s,
                                  const NameManifest& categories = NameManifest::categories(),
                                  const NameManifest& cuisines = NameManifest::cuisines());

// Shannon entropy (nats) of the normalized counts; 0 for an all-zero vector.
double place_entropy(std::span<const int> counts);

// TF-IDF of each document's term counts against the whole collection:
// tf * ln(N / df), 0 where df = 0.
std::vector<std::vector<double>> tfidf(const std::vector<std::vector<int>>& documents);

struct Attractiveness {
  std::vector<double> categories;
  std::vector<double> subcategories;
};

std::map<std::string, Attractiveness> neighborhood_attractiveness(
    const std::map<std::string, CategoryProfile>& profiles);

struct GeoFeatures {
  Ratio competition;
  Ratio specific_competition;
  CategoryProfile profile;
  double place_entropy = 0.0;
  Attractiveness attractiveness;
  bool empty_neighborhood = false;
};

struct GeoReport {
  std::size_t restaurants = 0;
  std::size_t empty_neighborhoods = 0;
  std::size_t no_restaurant_neighbors = 0;
  std::size_t unknown_category_strings = 0;
  std::size_t missing_businesses = 0;  // requested ids absent from the snapshot
};

struct GeoResult {
  std::map<std::string, GeoFeatures> features;
  FeatureTable table;
  GeoReport report;
};

// Locality features for the listed restaurants (TF-IDF documents are their
// neighborhoods); neighborhoods range over every business in the snapshot.
GeoResult compute_geo_features(const corpus::Snapshot& snapshot,
                               const std::vector<std::string>& restaurant_ids,
                               double radius_m = kDefaultRadiusM);

std::vector<std::string> geo_columns();

// Lowercase, non-alphanumerics collapsed to '_'.
std::string slug(std::string_view name);

}  // namespace bizsurv::geo
