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

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace bizsurv {

using Date = std::chrono::sys_days;
// Wall-clock instant as recorded in the source data (Yelp stores local time
// without an offset); arithmetic treats it as UTC.
using Timestamp = std::chrono::sys_seconds;

inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kDaysPerMonth = 30.44;

// "YYYY-MM-DD"
std::optional<Date> parse_date(std::string_view text);
// "YYYY-MM-DD HH:MM:SS" or "YYYY-MM-DDTHH:MM:SS"; a bare date means midnight.
std::optional<Timestamp> parse_timestamp(std::string_view text);

std::string format_date(Date d);
std::string format_timestamp(Timestamp t);

// Exclusive upper bound of a snapshot dated `d`: midnight after `d`.
inline Timestamp end_of_day(Date d) {
  return std::chrono::time_point_cast<std::chrono::seconds>(d + std::chrono::days{1});
}

int hour_of_day(Timestamp t);

// Months between two calendar months, `later` - `earlier`.
int month_distance(Timestamp earlier, Date later);

}  // namespace bizsurv
