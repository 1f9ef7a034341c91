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
#include <limits>

#include "bizsurv/common/error.hpp"
#include "bizsurv/common/feature_table.hpp"
#include "bizsurv/common/hash.hpp"
#include "bizsurv/common/io.hpp"
#include "bizsurv/common/manifests.hpp"
#include "bizsurv/common/rng.hpp"
#include "bizsurv/common/time.hpp"
#include "../support/fixtures.hpp"

namespace bizsurv {
namespace {

TEST(Hash, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(to_hex(0xabcULL), "0000000000000abc");
}

TEST(Rng, DerivedSeedsAreStableAndDistinct) {
  EXPECT_EQ(derive_seed(42, "train"), derive_seed(42, "train"));
  EXPECT_NE(derive_seed(42, "train"), derive_seed(42, "features"));
  EXPECT_NE(derive_seed(42, "train"), derive_seed(43, "train"));
}

TEST(Time, ParsesYelpTimestamps) {
  auto t = parse_timestamp("2017-03-04 18:22:09");
  ASSERT_TRUE(t);
  EXPECT_EQ(format_timestamp(*t), "2017-03-04 18:22:09");
  EXPECT_EQ(hour_of_day(*t), 18);
  EXPECT_TRUE(parse_timestamp("2017-03-04T18:22:09"));
  EXPECT_EQ(format_timestamp(*parse_timestamp("2017-03-04")), "2017-03-04 00:00:00");
  EXPECT_FALSE(parse_timestamp("2017-13-04"));
  EXPECT_FALSE(parse_timestamp("2017-02-30"));
  EXPECT_FALSE(parse_timestamp("2017-03-04 25:00:00"));
  EXPECT_FALSE(parse_date("yesterday"));
}

TEST(Time, MonthDistanceCountsCalendarMonths) {
  EXPECT_EQ(month_distance(testing::at(2017, 1, 31), testing::ymd(2017, 12, 1)), 11);
  EXPECT_EQ(month_distance(testing::at(2017, 12, 1), testing::ymd(2017, 12, 31)), 0);
}

TEST(Io, AtomicWriteAndDigest) {
  testing::TempDir dir("io");
  const auto p = dir.path() / "sub" / "file.txt";
  write_file_atomic(p, "hello");
  EXPECT_EQ(read_file(p), "hello");
  EXPECT_FALSE(std::filesystem::exists(p.string() + ".tmp"));
  const auto d1 = file_digest(p);
  write_file_atomic(p, "hello!");
  EXPECT_NE(file_digest(p), d1);
  EXPECT_THROW(read_file(dir.path() / "nope"), Error);
}

TEST(Io, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(-0.0), "0");
}

TEST(FeatureTable, CsvRoundTripIsExact) {
  testing::TempDir dir("csv");
  FeatureTable t;
  t.family = "geography";
  t.columns = {"a", "b.c"};
  t.ids = {"x", "y"};
  t.values = Matrix(2, 2);
  t.values(0, 0) = 1.0 / 7.0;
  t.values(0, 1) = 3;
  t.values(1, 0) = -1e-12;
  t.values(1, 1) = 0;
  write_feature_csv(t, dir.path() / "t.csv");
  const auto back = read_feature_csv(dir.path() / "t.csv", "geography");
  EXPECT_EQ(back.columns, t.columns);
  EXPECT_EQ(back.ids, t.ids);
  EXPECT_EQ(back.values, t.values);
}

TEST(FeatureTable, RejectsRaggedRows) {
  testing::TempDir dir("csv-bad");
  write_file_atomic(dir.path() / "bad.csv", "business_id,a,b\nx,1\n");
  EXPECT_THROW(read_feature_csv(dir.path() / "bad.csv", "g"), DataError);
  write_file_atomic(dir.path() / "bad2.csv", "id,a\nx,1\n");
  EXPECT_THROW(read_feature_csv(dir.path() / "bad2.csv", "g"), DataError);
}

TEST(Manifests, EmbeddedSizes) {
  EXPECT_EQ(NameManifest::categories().size(), 22u);
  EXPECT_EQ(NameManifest::cuisines().size(), 145u);
  EXPECT_TRUE(NameManifest::cuisines().find("pizza"));
  EXPECT_TRUE(NameManifest::categories().find("NIGHTLIFE"));
  EXPECT_FALSE(NameManifest::categories().find("Pizza"));
}

}  // namespace
}  // namespace bizsurv
