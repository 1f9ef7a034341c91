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
#include <chrono>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bizsurv/common/feature_table.hpp"
#include "bizsurv/corpus/snapshot.hpp"

namespace bizsurv::mobility {

using HourProfile = std::array<double, 24>;

// Consecutive reviews by one user at two different businesses.
struct Transition {
  std::string user_id;
  std::string from_id;
  std::string to_id;
  Timestamp t_from{};
  Timestamp t_to{};
  double distance_m = 0.0;
  double duration_s = 0.0;

  friend bool operator==(const Transition&, const Transition&) = default;
};

struct TransitionReport {
  std::size_t users = 0;
  std::size_t transitions = 0;
  std::size_t same_business_pairs = 0;
  std::size_t gap_exceeded = 0;
  std::size_t unresolved_endpoints = 0;
};

// Per user, reviews ordered by (timestamp, review_id); each adjacent pair at
// distinct known businesses within max_gap (if set) is one transition.
// Output is ordered by user_id, then time.
std::vector<Transition> extract_transitions(const corpus::Snapshot& snapshot,
                                            std::optional<std::chrono::seconds> max_gap = {},
                                            TransitionReport* report = nullptr);

struct Lifespan {
  double months = 0.0;
  bool undefined = false;  // no review or check-in at all
};

// (observation_end - first engagement) in 30.44-day months, floored at 1.
Lifespan lifespan_months(std::optional<Timestamp> first_engagement, Timestamp observation_end);
Lifespan lifespan_months(const std::string& business_id, const corpus::Snapshot& snapshot);

struct Flow {
  double inflow = 0.0;
  double outflow = 0.0;
};

// Transition counts into / out of the business divided by lifespan months.
Flow flow_rates(const std::string& business_id, std::span<const Transition> transitions,
                double months);

struct TravelStats {
  double avg_dist_to = 0.0;
  double avg_dist_from = 0.0;
  double avg_speed_to = 0.0;
  double avg_speed_from = 0.0;
  bool no_inbound = true;
  bool no_outbound = true;
};

// Mean distance and speed of inbound/outbound transitions. Zero-duration
// transitions count toward distance but not speed.
TravelStats transition_travel_stats(const std::string& business_id,
                                    std::span<const Transition> transitions);

struct TemporalProfile {
  HourProfile h{};
  bool missing = true;  // no check-ins
};

TemporalProfile temporal_profile(std::span<const Timestamp> checkins);

// Entropy (nats) of an hour profile, 0 ln 0 = 0.
double popularity_skew(const HourProfile& h);

struct Alignment {
  double value = 0.0;
  bool missing = true;  // no neighbor has check-ins
};

// Squared distance between h and the renormalized mean of the neighbors'
// normalized profiles. Missing neighbor profiles are skipped.
Alignment competitor_alignment(const HourProfile& h, std::span<const TemporalProfile> neighbors);

// OLS slope of counts against month index 1..n.
double visit_trend(std::span<const double> monthly_counts);

// Check-ins in each of the six calendar months ending with the month of
// `observation_end` (oldest first).
std::array<double, 6> monthly_checkins(std::span<const Timestamp> checkins, Date observation_end);

struct MobilityConfig {
  std::optional<std::chrono::seconds> max_gap;
  // Count only flows whose other endpoint lies in the restaurant's neighborhood.
  bool restrict_to_neighborhood = false;
  double radius_m = 500.0;
};

struct MobilityFeatures {
  Flow flow;
  TravelStats travel;
  double popularity_skew = 0.0;
  Alignment alignment;
  double visit_trend = 0.0;
  Lifespan lifespan;
  TemporalProfile profile;
};

struct MobilityResult {
  std::map<std::string, MobilityFeatures> features;
  std::vector<Transition> transitions;
  TransitionReport transition_report;
  FeatureTable table;
};

MobilityResult compute_mobility_features(const corpus::Snapshot& snapshot,
                                         const std::vector<std::string>& restaurant_ids,
                                         const MobilityConfig& config = {});

std::vector<std::string> mobility_columns();

std::string transitions_jsonl(std::span<const Transition> transitions);

}  // namespace bizsurv::mobility
