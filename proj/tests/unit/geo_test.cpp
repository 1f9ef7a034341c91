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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "bizsurv/common/rng.hpp"
#include "bizsurv/geo/geo.hpp"
#include "../support/fixtures.hpp"

namespace bizsurv::geo {
namespace {

TEST(Distance, HaversineReference) {
  EXPECT_NEAR(geo_distance({0, 0}, {0, 1}), 111195.0, 1.0);
  EXPECT_DOUBLE_EQ(geo_distance({33.4, -112.0}, {33.4, -112.0}), 0.0);
  LatLon a{33.45, -112.07}, b{33.47, -112.01};
  EXPECT_DOUBLE_EQ(geo_distance(a, b), geo_distance(b, a));
  // Antipodes: half the circumference.
  EXPECT_NEAR(geo_distance({0, 0}, {0, 180}), kEarthRadiusM * 3.14159265358979323846, 1e-6);
}

TEST(SpatialIndex, MatchesBruteForceAcrossRadii) {
  Rng rng(1);
  std::vector<LatLon> pts;
  for (int i = 0; i < 300; ++i) pts.push_back({-0.01 + rng.uniform(0, 0.02), 179.99 + rng.uniform(0, 0.009)});
  for (double r : {50.0, 500.0, 2000.0}) {
    SpatialIndex index(pts, 500.0);
    for (std::size_t i = 0; i < pts.size(); i += 7) {
      std::vector<std::size_t> brute;
      for (std::size_t j = 0; j < pts.size(); ++j)
        if (geo_distance(pts[i], pts[j]) <= r) brute.push_back(j);
      EXPECT_EQ(index.within(pts[i], r), brute) << "radius " << r;
    }
  }
}

TEST(SpatialIndex, InclusiveBoundary) {
  std::vector<LatLon> pts = {{0, 0}, {0, 0.0045}};
  const double d = geo_distance(pts[0], pts[1]);
  SpatialIndex index(pts, d);
  EXPECT_EQ(index.within(pts[0], d).size(), 2u);
}

corpus::Snapshot street() {
  using testing::business;
  // Center plus neighbors ~100 m apart along a meridian; the last one is far away.
  return corpus::Snapshot(testing::ymd(2017, 12, 31),
                          {business("c", 33.0, -112.0, {"Restaurants", "Pizza", "Italian"}),
                           business("r1", 33.001, -112.0, {"Restaurants", "Pizza"}),
                           business("r2", 33.002, -112.0, {"Restaurants", "Thai"}),
                           business("s1", 33.003, -112.0, {"Shopping", "Mystery Category"}),
                           business("far", 34.0, -112.0, {"Restaurants", "Pizza"})},
                          {}, {}, {});
}

TEST(Neighborhoods, CompetitionRatios) {
  auto s = street();
  auto hoods = build_neighborhoods(s, 500.0);
  const auto& n = hoods.at("c");
  EXPECT_EQ(n.members, (std::vector<std::size_t>{1, 2, 3}));
  auto comp = competition(n, s);
  EXPECT_FALSE(comp.missing);
  EXPECT_DOUBLE_EQ(comp.value, 2.0 / 3.0);
  auto spec = specific_competition(n, s, cuisine_set(s.businesses()[0]));
  EXPECT_DOUBLE_EQ(spec.value, 0.5);
  EXPECT_TRUE(hoods.at("far").members.empty());
  EXPECT_TRUE(competition(hoods.at("far"), s).missing);
}

TEST(Neighborhoods, CategoryProfilesCountMembers) {
  auto s = street();
  auto hoods = build_neighborhoods(s, 500.0);
  auto p = category_profiles(hoods.at("c"), s);
  const auto restaurants = *NameManifest::categories().find("Restaurants");
  const auto shopping = *NameManifest::categories().find("Shopping");
  EXPECT_EQ(p.categories[restaurants], 2);
  EXPECT_EQ(p.categories[shopping], 1);
  EXPECT_EQ(p.subcategories[*NameManifest::cuisines().find("Pizza")], 1);
  EXPECT_EQ(p.unknown, 1u);
}

TEST(Entropy, BoundsAndEdgeCases) {
  EXPECT_EQ(place_entropy(std::vector<int>(22, 0)), 0.0);
  std::vector<int> one(22, 0);
  one[3] = 9;
  EXPECT_EQ(place_entropy(one), 0.0);
  EXPECT_NEAR(place_entropy(std::vector<int>(22, 5)), std::log(22.0), 1e-12);
  EXPECT_NEAR(place_entropy(std::vector<int>{1, 1}), std::log(2.0), 1e-15);
}

TEST(Tfidf, HandComputed) {
  auto w = tfidf({{2, 0, 1}, {0, 0, 1}, {1, 0, 0}});
  EXPECT_NEAR(w[0][0], 2 * std::log(3.0 / 2.0), 1e-15);
  EXPECT_EQ(w[0][1], 0.0);
  EXPECT_NEAR(w[1][2], std::log(3.0 / 2.0), 1e-15);
  EXPECT_EQ(w[2][2], 0.0);
  // A term in every document carries no weight.
  auto all = tfidf({{1}, {4}});
  EXPECT_EQ(all[0][0], 0.0);
  EXPECT_EQ(all[1][0], 0.0);
}

TEST(GeoFeatures, TableShapeAndFlags) {
  auto s = street();
  auto r = compute_geo_features(s, {"c", "far", "missing"}, 500.0);
  EXPECT_EQ(r.table.columns, geo_columns());
  EXPECT_EQ(r.table.ids, (std::vector<std::string>{"c", "far"}));
  EXPECT_EQ(r.report.missing_businesses, 1u);
  EXPECT_EQ(r.report.empty_neighborhoods, 1u);
  EXPECT_TRUE(r.features.at("far").empty_neighborhood);
}

TEST(Slug, Normalizes) {
  EXPECT_EQ(slug("Arts & Entertainment"), "arts_entertainment");
  EXPECT_EQ(slug("Hot Dogs"), "hot_dogs");
}

}  // namespace
}  // namespace bizsurv::geo
