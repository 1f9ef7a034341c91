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

#include "bizsurv/common/error.hpp"
#include "bizsurv/mobility/mobility.hpp"
#include "../support/fixtures.hpp"

namespace bizsurv::mobility {
namespace {

using testing::at;

corpus::Snapshot town() {
  using testing::business;
  using testing::review;
  return corpus::Snapshot(
      testing::ymd(2017, 12, 31),
      {business("a", 33.0, -112.0, {"Restaurants"}), business("b", 33.001, -112.0, {"Restaurants"}),
       business("c", 33.01, -112.0, {"Bars"})},
      {review("r1", "a", "u1", 4, at(2017, 1, 1, 10)), review("r2", "b", "u1", 4, at(2017, 1, 1, 12)),
       review("r3", "b", "u1", 4, at(2017, 1, 5, 12)), review("r4", "c", "u1", 4, at(2017, 1, 9, 12)),
       review("r5", "ghost", "u2", 4, at(2017, 1, 1, 12)), review("r6", "a", "u2", 4, at(2017, 1, 2, 12))},
      {{"a", {at(2017, 7, 1, 9), at(2017, 8, 1, 9), at(2017, 12, 1, 21), at(2017, 12, 2, 21)}},
       {"b", {at(2017, 12, 1, 21)}}},
      {});
}

TEST(Transitions, ConsecutiveDistinctPairs) {
  TransitionReport rep;
  auto t = extract_transitions(town(), std::nullopt, &rep);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].from_id, "a");
  EXPECT_EQ(t[0].to_id, "b");
  EXPECT_DOUBLE_EQ(t[0].duration_s, 7200.0);
  EXPECT_NEAR(t[0].distance_m, 111.19, 0.1);
  EXPECT_EQ(t[1].from_id, "b");
  EXPECT_EQ(t[1].to_id, "c");
  EXPECT_EQ(rep.same_business_pairs, 1u);
  EXPECT_EQ(rep.unresolved_endpoints, 1u);
}

TEST(Transitions, MaxGapFilters) {
  TransitionReport rep;
  auto t = extract_transitions(town(), std::chrono::hours{24}, &rep);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(rep.gap_exceeded, 1u);
}

TEST(Lifespan, MonthsFromFirstEngagement) {
  auto s = town();
  auto l = lifespan_months("a", s);
  EXPECT_FALSE(l.undefined);
  const double days = double((s.period_end() - at(2017, 1, 1, 10)).count()) / 86400.0;
  EXPECT_DOUBLE_EQ(l.months, days / 30.44);
  EXPECT_TRUE(lifespan_months("nobody", s).undefined);
  EXPECT_DOUBLE_EQ(lifespan_months(s.period_end() - std::chrono::hours{1}, s.period_end()).months, 1.0);
}

TEST(Flow, CountsPerMonth) {
  auto t = extract_transitions(town());
  auto f = flow_rates("b", t, 2.0);
  EXPECT_DOUBLE_EQ(f.inflow, 0.5);
  EXPECT_DOUBLE_EQ(f.outflow, 0.5);
  EXPECT_THROW(flow_rates("b", t, 0.5), Error);
}

TEST(Travel, ZeroDurationSkipsSpeed) {
  std::vector<Transition> t = {{"u", "x", "y", at(2017, 1, 1), at(2017, 1, 1), 100.0, 0.0},
                               {"u", "x", "y", at(2017, 1, 1), at(2017, 1, 1), 300.0, 100.0}};
  auto s = transition_travel_stats("y", t);
  EXPECT_DOUBLE_EQ(s.avg_dist_to, 200.0);
  EXPECT_DOUBLE_EQ(s.avg_speed_to, 3.0);
  EXPECT_FALSE(s.no_inbound);
  EXPECT_TRUE(s.no_outbound);
}

TEST(Temporal, ProfileIsNormalized) {
  std::vector<Timestamp> c = {at(2017, 1, 1, 9), at(2017, 1, 2, 9), at(2017, 1, 3, 20)};
  auto p = temporal_profile(c);
  EXPECT_FALSE(p.missing);
  double sum = 0;
  for (double v : p.h) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(p.h[9], 2.0 / 3.0);
  EXPECT_NEAR(popularity_skew(p.h), -(2.0 / 3 * std::log(2.0 / 3) + 1.0 / 3 * std::log(1.0 / 3)), 1e-15);
  EXPECT_TRUE(temporal_profile({}).missing);
}

TEST(Temporal, AlignmentAgainstNeighbors) {
  HourProfile h{};
  h[9] = 1.0;
  TemporalProfile n1, n2, missing;
  n1.h[9] = 1.0;
  n1.missing = false;
  n2.h[21] = 1.0;
  n2.missing = false;
  std::vector<TemporalProfile> same = {n1, missing};
  EXPECT_DOUBLE_EQ(competitor_alignment(h, same).value, 0.0);
  std::vector<TemporalProfile> mixed = {n1, n2};
  EXPECT_DOUBLE_EQ(competitor_alignment(h, mixed).value, 0.5);
  std::vector<TemporalProfile> none = {missing};
  EXPECT_TRUE(competitor_alignment(h, none).missing);
}

TEST(Temporal, TrendIsOlsSlope) {
  std::vector<double> line = {3, 5, 7, 9, 11, 13};
  EXPECT_DOUBLE_EQ(visit_trend(line), 2.0);
  std::vector<double> flat(6, 4.0);
  EXPECT_DOUBLE_EQ(visit_trend(flat), 0.0);
  auto m = monthly_checkins(town().checkins()[0].timestamps, testing::ymd(2017, 12, 31));
  EXPECT_EQ(m, (std::array<double, 6>{1, 1, 0, 0, 0, 2}));
}

TEST(MobilityFeatures, TableShape) {
  auto r = compute_mobility_features(town(), {"a", "b"});
  EXPECT_EQ(r.table.columns, mobility_columns());
  EXPECT_EQ(r.table.ids.size(), 2u);
  EXPECT_EQ(r.table.values.cols(), mobility_columns().size());
}

}  // namespace
}  // namespace bizsurv::mobility
