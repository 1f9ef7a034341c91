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

#include "bizsurv/corpus/labels.hpp"

#include <algorithm>
#include <fstream>

#include "bizsurv/common/error.hpp"
#include "bizsurv/common/io.hpp"

namespace bizsurv::corpus {
using nlohmann::json;

std::string_view to_string(Survival s) { return s == Survival::Survived ? "survived" : "dead"; }

json LabelReport::to_json() const {
  return json{{"restaurants_observed", restaurants_observed},
              {"excluded_closed", excluded_closed},
              {"considered", considered},
              {"survived", survived},
              {"dead", dead},
              {"dead_closed", dead_closed},
              {"dead_delisted", dead_delisted}};
}

Labeling derive_labels(const Snapshot& observation, const Snapshot& prediction) {
  if (!(observation.as_of() < prediction.as_of())) {
    throw DataError("observation snapshot (" + format_date(observation.as_of()) +
                    ") must predate prediction snapshot (" + format_date(prediction.as_of()) +
                    ")");
  }
  bool any_shared = false;
  for (const auto& b : observation.businesses()) {
    if (prediction.find(b.business_id)) {
      any_shared = true;
      break;
    }
  }
  if (!any_shared) {
    throw DataError("observation and prediction snapshots share no business ids");
  }

  Labeling out;
  auto& rep = out.report;
  for (const auto& b : observation.businesses()) {
    if (!is_restaurant(b)) continue;
    ++rep.restaurants_observed;
    if (!b.is_open) {
      ++rep.excluded_closed;
      continue;
    }
    ++rep.considered;
    Survival label = Survival::Dead;
    if (const auto* later = prediction.find(b.business_id)) {
      if (later->is_open) {
        label = Survival::Survived;
        ++rep.survived;
      } else {
        ++rep.dead_closed;
      }
    } else {
      ++rep.dead_delisted;
    }
    if (label == Survival::Dead) ++rep.dead;
    out.labels.push_back({b.business_id, label, observation.as_of(), prediction.as_of()});
  }
  std::sort(out.labels.begin(), out.labels.end(),
            [](const auto& a, const auto& b) { return a.business_id < b.business_id; });
  return out;
}

void write_labels_jsonl(const std::vector<LabeledRestaurant>& labels,
                        const std::filesystem::path& path) {
  std::string out;
  for (const auto& l : labels) {
    nlohmann::ordered_json j;
    j["business_id"] = l.business_id;
    j["label"] = to_string(l.label);
    j["observation_end"] = format_date(l.observation_end);
    j["prediction_end"] = format_date(l.prediction_end);
    out += j.dump();
    out += '\n';
  }
  write_file_atomic(path, out);
}

std::vector<LabeledRestaurant> read_labels_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<LabeledRestaurant> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = json::parse(line);
    LabeledRestaurant l;
    l.business_id = j.at("business_id").get<std::string>();
    auto label = j.at("label").get<std::string>();
    if (label != "survived" && label != "dead") throw DataError("unknown label " + label);
    l.label = label == "survived" ? Survival::Survived : Survival::Dead;
    auto obs = parse_date(j.at("observation_end").get<std::string>());
    auto pred = parse_date(j.at("prediction_end").get<std::string>());
    if (!obs || !pred) throw DataError("bad date in " + path.string());
    l.observation_end = *obs;
    l.prediction_end = *pred;
    out.push_back(std::move(l));
  }
  return out;
}

}  // namespace bizsurv::corpus
