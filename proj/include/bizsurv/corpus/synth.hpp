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
#include <string>
#include <vector>

#include "bizsurv/corpus/snapshot.hpp"

namespace bizsurv::corpus {

// Ground-truth survival model: logit P(survive) = logit(base_survival)
//   + sum_v coefficient[v] * z_v  - ln(low_review_death_odds) * [reviews < threshold]
// where z_v is the latent variable v standardized over all restaurants.
// Attribute-only signal used unless the caller supplies its own.
const std::map<std::string, double>& default_planted_coefficients();

struct PlantedSignal {
  double base_survival = 0.75;
  std::map<std::string, double> coefficients = default_planted_coefficients();
  int review_threshold = 0;
  double low_review_death_odds = 1.0;
};

struct SynthConfig {
  int restaurants = 1000;
  int other_businesses = 600;
  int users = 800;
  // Reviews per restaurant are 3 + Poisson(extra_reviews_per_restaurant).
  double extra_reviews_per_restaurant = 5.0;
  double reviews_per_other_business = 2.0;
  double checkins_per_restaurant = 25.0;
  double photos_per_restaurant = 1.5;
  double center_latitude = 33.45;
  double center_longitude = -112.07;
  double extent_km = 8.0;
  int districts = 12;
  Date history_start = Date{std::chrono::year{2012} / 1 / 1};
  Date observation_end = Date{std::chrono::year{2017} / 12 / 31};
  Date prediction_end = Date{std::chrono::year{2019} / 12 / 31};
  double closed_at_observation = 0.15;
  double delisted_share = 0.3;  // of dead restaurants, share missing from the later dump
  PlantedSignal signal;
};

struct PlantedTruth {
  std::string business_id;
  bool open_at_observation = false;
  double score = 0.0;                  // planted logit
  double survival_probability = 0.0;
  bool survived = false;
};

struct SyntheticCorpus {
  Snapshot observation;
  Snapshot prediction;
  std::vector<PlantedTruth> truth;  // one per restaurant, in generation order
};

// Names accepted as PlantedSignal coefficients.
const std::vector<std::string>& planted_variables();

// Throws DataError for infeasible configurations.
SyntheticCorpus generate_synthetic_corpus(const SynthConfig& config, std::uint64_t seed);

// Expected AUC of the planted probabilities as a score over restaurants open
// at observation end, with labels drawn from those same probabilities.
double planted_oracle_auc(const std::vector<PlantedTruth>& truth);

}  // namespace bizsurv::corpus
