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

#include "bizsurv/mobility/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "bizsurv/common/error.hpp"
#include "bizsurv/common/io.hpp"
#include "bizsurv/geo/geo.hpp"

namespace bizsurv::mobility {

std::vector<Transition> extract_transitions(const corpus::Snapshot& snapshot,
                                            std::optional<std::chrono::seconds> max_gap,
                                            TransitionReport* report) {
  TransitionReport local;
  auto& rep = report ? *report : local;
  rep = {};
  std::map<std::string_view, std::vector<const corpus::ReviewRecord*>> by_user;
  for (const auto& r : snapshot.reviews()) by_user[r.user_id].push_back(&r);
  rep.users = by_user.size();

  std::vector<Transition> out;
  for (auto& [user, reviews] : by_user) {
    std::sort(reviews.begin(), reviews.end(), [](const auto* a, const auto* b) {
      if (a->timestamp != b->timestamp) return a->timestamp < b->timestamp;
      return a->review_id < b->review_id;
    });
    for (std::size_t i = 1; i < reviews.size(); ++i) {
      const auto& a = *reviews[i - 1];
      const auto& b = *reviews[i];
      if (a.business_id == b.business_id) {
        ++rep.same_business_pairs;
        continue;
      }
      const auto gap = b.timestamp - a.timestamp;
      if (max_gap && gap > *max_gap) {
        ++rep.gap_exceeded;
        continue;
      }
      const auto* from = snapshot.find(a.business_id);
      const auto* to = snapshot.find(b.business_id);
      if (!from || !to) {
        ++rep.unresolved_endpoints;
        continue;
      }
      out.push_back({a.user_id, a.business_id, b.business_id, a.timestamp, b.timestamp,
                     geo::geo_distance({from->latitude, from->longitude}, {to->latitude, to->longitude}),
                     static_cast<double>(gap.count())});
    }
  }
  rep.transitions = out.size();
  return out;
}

Lifespan lifespan_months(std::optional<Timestamp> first_engagement, Timestamp observation_end) {
  if (!first_engagement) return {0.0, true};
  const double days = double((observation_end - *first_engagement).count()) / kSecondsPerDay;
  return {std::max(1.0, days / kDaysPerMonth), false};
}

Lifespan lifespan_months(const std::string& business_id, const corpus::Snapshot& snapshot) {
  std::optional<Timestamp> first;
  auto consider = [&](Timestamp t) {
    if (!first || t < *first) first = t;
  };
  for (const auto& r : snapshot.reviews()) {
    if (r.business_id == business_id) consider(r.timestamp);
  }
  for (const auto& c : snapshot.checkins()) {
    if (c.business_id != business_id) continue;
    for (auto t : c.timestamps) consider(t);
  }
  return lifespan_months(first, snapshot.period_end());
}

Flow flow_rates(const std::string& business_id, std::span<const Transition> transitions,
                double months) {
  if (!(months >= 1.0)) throw Error("flow_rates: lifespan must be at least one month");
  std::size_t in = 0, out = 0;
  for (const auto& t : transitions) {
    in += t.to_id == business_id ? 1 : 0;
    out += t.from_id == business_id ? 1 : 0;
  }
  return {double(in) / months, double(out) / months};
}

namespace {

struct Accumulator {
  double dist_sum = 0.0;
  std::size_t n = 0;
  double speed_sum = 0.0;
  std::size_t n_speed = 0;

  void add(const Transition& t) {
    dist_sum += t.distance_m;
    ++n;
    if (t.duration_s > 0.0) {
      speed_sum += t.distance_m / t.duration_s;
      ++n_speed;
    }
  }
  double mean_dist() const { return n ? dist_sum / double(n) : 0.0; }
  double mean_speed() const { return n_speed ? speed_sum / double(n_speed) : 0.0; }
};

}  // namespace

TravelStats transition_travel_stats(const std::string& business_id,
                                    std::span<const Transition> transitions) {
  Accumulator to, from;
  for (const auto& t : transitions) {
    if (t.to_id == business_id) to.add(t);
    if (t.from_id == business_id) from.add(t);
  }
  return {to.mean_dist(), from.mean_dist(), to.mean_speed(), from.mean_speed(), to.n == 0,
          from.n == 0};
}

TemporalProfile temporal_profile(std::span<const Timestamp> checkins) {
  TemporalProfile p;
  if (checkins.empty()) return p;
  for (auto t : checkins) p.h[hour_of_day(t)] += 1.0;
  const double total = double(checkins.size());
  for (auto& v : p.h) v /= total;
  p.missing = false;
  return p;
}

double popularity_skew(const HourProfile& h) {
  double e = 0.0;
  for (double v : h) {
    if (v > 0.0) e -= v * std::log(v);
  }
  return std::max(e, 0.0);
}

Alignment competitor_alignment(const HourProfile& h, std::span<const TemporalProfile> neighbors) {
  HourProfile agg{};
  std::size_t n = 0;
  for (const auto& p : neighbors) {
    if (p.missing) continue;
    for (int i = 0; i < 24; ++i) agg[i] += p.h[i];
    ++n;
  }
  if (n == 0) return {0.0, true};
  double total = 0.0;
  for (double v : agg) total += v;
  double d = 0.0;
  for (int i = 0; i < 24; ++i) {
    const double diff = h[i] - agg[i] / total;
    d += diff * diff;
  }
  return {d, false};
}

double visit_trend(std::span<const double> monthly_counts) {
  const std::size_t n = monthly_counts.size();
  if (n < 2) return 0.0;
  const double x_mean = (double(n) + 1.0) / 2.0;
  double y_mean = 0.0;
  for (double y : monthly_counts) y_mean += y;
  y_mean /= double(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = double(i + 1) - x_mean;
    sxy += dx * (monthly_counts[i] - y_mean);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

std::array<double, 6> monthly_checkins(std::span<const Timestamp> checkins, Date observation_end) {
  std::array<double, 6> counts{};
  const Timestamp end = end_of_day(observation_end);
  for (auto t : checkins) {
    if (t >= end) continue;
    const int back = month_distance(t, observation_end);
    if (back >= 0 && back < 6) counts[5 - back] += 1.0;
  }
  return counts;
}

std::vector<std::string> mobility_columns() {
  std::vector<std::string> cols = {"inflow",        "outflow",         "avg_dist_to",
                                   "avg_dist_from", "avg_speed_to",    "avg_speed_from",
                                   "popularity_skew", "competitor_alignment", "visit_trend",
                                   "lifespan_months"};
  for (int i = 0; i < 24; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "hour_%02d", i);
    cols.emplace_back(buf);
  }
  for (const char* flag : {"no_engagement", "no_inbound", "no_outbound", "no_checkins",
                           "no_neighbor_checkins"}) {
    cols.emplace_back(flag);
  }
  return cols;
}

MobilityResult compute_mobility_features(const corpus::Snapshot& snapshot,
                                         const std::vector<std::string>& restaurant_ids,
                                         const MobilityConfig& config) {
  MobilityResult result;
  result.transitions = extract_transitions(snapshot, config.max_gap, &result.transition_report);

  const auto& businesses = snapshot.businesses();
  std::vector<geo::LatLon> points;
  points.reserve(businesses.size());
  for (const auto& b : businesses) points.push_back({b.latitude, b.longitude});
  geo::SpatialIndex index(std::move(points), config.radius_m);

  std::vector<TemporalProfile> profiles(businesses.size());
  std::vector<std::optional<Timestamp>> first(businesses.size());
  std::vector<std::vector<Timestamp>> checkin_times(businesses.size());
  for (const auto& c : snapshot.checkins()) {
    auto i = snapshot.index_of(c.business_id);
    if (i == corpus::Snapshot::npos) continue;
    auto& v = checkin_times[i];
    v.insert(v.end(), c.timestamps.begin(), c.timestamps.end());
  }
  for (std::size_t i = 0; i < businesses.size(); ++i) {
    profiles[i] = temporal_profile(checkin_times[i]);
    if (!checkin_times[i].empty()) {
      first[i] = *std::min_element(checkin_times[i].begin(), checkin_times[i].end());
    }
  }
  for (const auto& r : snapshot.reviews()) {
    auto i = snapshot.index_of(r.business_id);
    if (i == corpus::Snapshot::npos) continue;
    if (!first[i] || r.timestamp < *first[i]) first[i] = r.timestamp;
  }

  // Transitions grouped by endpoint.
  std::unordered_map<std::string_view, std::vector<std::size_t>> touching;
  for (std::size_t t = 0; t < result.transitions.size(); ++t) {
    touching[result.transitions[t].from_id].push_back(t);
    touching[result.transitions[t].to_id].push_back(t);
  }

  const Timestamp obs_end = snapshot.period_end();
  std::vector<Transition> mine;
  for (const auto& id : restaurant_ids) {
    const auto pos = snapshot.index_of(id);
    if (pos == corpus::Snapshot::npos) continue;
    auto members = index.within({businesses[pos].latitude, businesses[pos].longitude}, config.radius_m);
    members.erase(std::remove(members.begin(), members.end(), pos), members.end());

    mine.clear();
    if (auto it = touching.find(id); it != touching.end()) {
      std::unordered_set<std::string_view> nearby;
      if (config.restrict_to_neighborhood) {
        for (auto m : members) nearby.insert(businesses[m].business_id);
      }
      for (auto t : it->second) {
        const auto& tr = result.transitions[t];
        if (config.restrict_to_neighborhood) {
          const auto& other = tr.from_id == id ? tr.to_id : tr.from_id;
          if (!nearby.contains(other)) continue;
        }
        mine.push_back(tr);
      }
    }

    MobilityFeatures f;
    f.lifespan = lifespan_months(first[pos], obs_end);
    if (!f.lifespan.undefined) f.flow = flow_rates(id, mine, f.lifespan.months);
    f.travel = transition_travel_stats(id, mine);
    f.profile = profiles[pos];
    f.popularity_skew = popularity_skew(f.profile.h);
    std::vector<TemporalProfile> neighbor_profiles;
    neighbor_profiles.reserve(members.size());
    for (auto m : members) neighbor_profiles.push_back(profiles[m]);
    f.alignment = competitor_alignment(f.profile.h, neighbor_profiles);
    const auto monthly = monthly_checkins(checkin_times[pos], snapshot.as_of());
    f.visit_trend = visit_trend(monthly);
    result.features.emplace(id, f);
  }

  auto& table = result.table;
  table.family = "mobility";
  table.columns = mobility_columns();
  table.values = Matrix(0, table.columns.size());
  std::vector<double> row;
  for (const auto& [id, f] : result.features) {
    row = {f.flow.inflow,          f.flow.outflow,         f.travel.avg_dist_to,
           f.travel.avg_dist_from, f.travel.avg_speed_to,  f.travel.avg_speed_from,
           f.popularity_skew,      f.alignment.value,      f.visit_trend,
           f.lifespan.months};
    row.insert(row.end(), f.profile.h.begin(), f.profile.h.end());
    row.push_back(f.lifespan.undefined ? 1.0 : 0.0);
    row.push_back(f.travel.no_inbound ? 1.0 : 0.0);
    row.push_back(f.travel.no_outbound ? 1.0 : 0.0);
    row.push_back(f.profile.missing ? 1.0 : 0.0);
    row.push_back(f.alignment.missing ? 1.0 : 0.0);
    table.ids.push_back(id);
    table.values.append_row(row);
  }
  return result;
}

std::string transitions_jsonl(std::span<const Transition> transitions) {
  std::string out;
  for (const auto& t : transitions) {
    nlohmann::ordered_json j;
    j["user_id"] = t.user_id;
    j["from_id"] = t.from_id;
    j["to_id"] = t.to_id;
    j["t_from"] = format_timestamp(t.t_from);
    j["t_to"] = format_timestamp(t.t_to);
    j["distance_m"] = t.distance_m;
    j["duration_s"] = t.duration_s;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace bizsurv::mobility
