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

#include "bizsurv/attributes/attributes.hpp"
#include "../support/fixtures.hpp"

namespace bizsurv::attributes {
namespace {

using nlohmann::json;

std::size_t column(const std::string& name) {
  const auto& s = attribute_schema();
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i].name == name) return i;
  ADD_FAILURE() << "no column " << name;
  return 0;
}

TEST(Literals, NormalizesPythonReprs) {
  EXPECT_EQ(normalize_literal(json("u'free'")), "free");
  EXPECT_EQ(normalize_literal(json("'beer_and_wine'")), "beer_and_wine");
  EXPECT_EQ(normalize_literal(json("None")), "");
  EXPECT_EQ(normalize_literal(json(nullptr)), "");
  EXPECT_EQ(normalize_literal(json(true)), "True");
  EXPECT_EQ(normalize_literal(json(2)), "2");
}

TEST(Literals, ParsesDictStrings) {
  auto d = parse_literal_dict(json("{'romantic': False, 'classy': True, u'casual': None}"));
  EXPECT_EQ(d.at("romantic"), "False");
  EXPECT_EQ(d.at("classy"), "True");
  EXPECT_EQ(d.at("casual"), "");
  auto o = parse_literal_dict(json{{"Garage", false}, {"street", true}});
  EXPECT_EQ(o.at("garage"), "False");
  EXPECT_TRUE(parse_literal_dict(json("not a dict")).empty());
}

TEST(Encode, RowMatchesSchema) {
  corpus::BusinessRecord b = testing::business("b", 0, 0, {"Restaurants"});
  b.attributes = json{{"RestaurantsPriceRange2", "3"},
                      {"Ambience", "{'trendy': True, 'divey': False}"},
                      {"Alcohol", "u'full_bar'"},
                      {"WiFi", "'free'"},
                      {"OutdoorSeating", "True"},
                      {"HasTV", "False"},
                      {"RestaurantsAttire", "'spacesuit'"}};
  b.review_count = 17;
  EncodeReport rep;
  auto v = encode_attributes(b, &rep);
  auto row = v.to_row();
  ASSERT_EQ(row.size(), attribute_schema().size());
  EXPECT_EQ(row[column("price_range")], 3);
  EXPECT_EQ(row[column("ambience.trendy.present")], 1);
  EXPECT_EQ(row[column("ambience.trendy.value")], 1);
  EXPECT_EQ(row[column("ambience.divey.present")], 1);
  EXPECT_EQ(row[column("ambience.divey.value")], 0);
  EXPECT_EQ(row[column("ambience.classy.present")], 0);
  EXPECT_EQ(row[column("alcohol.full_bar")], 1);
  EXPECT_EQ(row[column("alcohol.missing")], 0);
  EXPECT_EQ(row[column("wifi.free")], 1);
  EXPECT_EQ(row[column("outdoor_seating.value")], 1);
  EXPECT_EQ(row[column("has_tv.present")], 1);
  EXPECT_EQ(row[column("has_tv.value")], 0);
  EXPECT_EQ(row[column("attire.missing")], 1);
  EXPECT_EQ(row[column("review_count")], 17);
  EXPECT_EQ(rep.unrecognized, 1u);
  EXPECT_EQ(rep.by_attribute.at("RestaurantsAttire"), 1u);
}

TEST(Encode, MissingAttributesAreAllMissing) {
  auto row = encode_attributes(testing::business("b", 0, 0, {"Restaurants"})).to_row();
  EXPECT_EQ(row[column("price_range")], 0);
  EXPECT_EQ(row[column("wifi.missing")], 1);
  EXPECT_EQ(row[column("happy_hour.present")], 0);
}

TEST(Schema, JsonDescribesEveryColumn) {
  auto j = attribute_schema_json();
  EXPECT_EQ(j["width"], attribute_schema().size());
  EXPECT_EQ(j["columns"].size(), attribute_schema().size());
  for (const auto& c : j["columns"]) {
    const auto t = c["type"].get<std::string>();
    EXPECT_TRUE(t == "ordinal" || t == "binary" || t == "count");
  }
}

TEST(Features, CountsComeFromTheObservationWindow) {
  using testing::at;
  corpus::Snapshot s(testing::ymd(2017, 12, 31), {testing::business("a", 0, 0, {"Restaurants"})},
                     {testing::review("r1", "a", "u", 5, at(2017, 1, 1)), testing::review("r2", "a", "u", 5, at(2017, 2, 1))},
                     {}, {{"p1", "a"}, {"p2", "a"}, {"p3", "zz"}});
  auto r = compute_attribute_features(s, {"a"});
  ASSERT_EQ(r.table.ids.size(), 1u);
  EXPECT_EQ(r.table.values(0, column("image_count")), 2);
  EXPECT_EQ(r.table.values(0, column("review_count")), 2);
  auto c = engagement_counts("a", s, s.period_end());
  EXPECT_EQ(c.image_count, 2);
  EXPECT_EQ(c.review_count, 2);
}

}  // namespace
}  // namespace bizsurv::attributes
