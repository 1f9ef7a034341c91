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

#include "bizsurv/corpus/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include "bizsurv/common/error.hpp"
#include "bizsurv/common/manifests.hpp"
#include "bizsurv/common/rng.hpp"

namespace bizsurv::corpus {
namespace {

using nlohmann::json;

// Review vocabulary. Positive and negative pools are disjoint.
constexpr std::array kPositiveWords = {
    "delicious", "amazing",   "fantastic",  "friendly",   "wonderful", "excellent",
    "tasty",     "fresh",     "perfect",    "lovely",     "awesome",   "superb",
    "cozy",      "attentive", "flavorful",  "generous",   "outstanding", "favorite",
    "recommend", "gem",       "best",       "crispy",     "juicy",     "warm",
    "welcoming", "clean",     "quick",      "reasonable", "impressed", "enjoyed",
    "love",      "loved",     "great",      "incredible", "yummy",     "heavenly",
    "charming",  "helpful",   "polite",     "spotless",   "tender",    "authentic",
    "phenomenal", "divine",   "pleasant",   "satisfying", "bright",    "vibrant",
    "fabulous",  "stellar",   "refreshing", "savory",     "succulent", "gracious",
    "prompt",    "affordable", "beautiful", "happy",      "glad",      "terrific"};

constexpr std::array kNegativeWords = {
    "terrible",  "awful",     "rude",       "bland",      "cold",      "stale",
    "dirty",     "slow",      "overpriced", "greasy",     "soggy",     "burnt",
    "disgusting", "horrible", "mediocre",   "disappointing", "worst",  "gross",
    "undercooked", "inedible", "unfriendly", "filthy",    "noisy",     "cramped",
    "expensive", "waited",    "ignored",    "sick",       "tasteless", "dry",
    "salty",     "smelly",    "sticky",     "chaotic",    "careless",  "lukewarm",
    "rubbery",   "watery",    "nasty",      "unprofessional", "dismissive", "poor",
    "avoid",     "refund",    "complaint",  "hair",       "bug",       "violation",
    "spoiled",   "rancid",    "sloppy",     "disaster",   "regret",    "unacceptable",
    "mess",      "wrong",     "angry",      "annoyed",    "bad",       "never"};

constexpr std::array kNeutralWords = {
    "chicken",  "salad",    "burger",   "pizza",    "pasta",    "sushi",    "taco",
    "burrito",  "sandwich", "soup",     "steak",    "fries",    "rice",     "noodles",
    "curry",    "dessert",  "coffee",   "tea",      "beer",     "wine",     "cocktail",
    "bread",    "cheese",   "sauce",    "menu",     "table",    "server",   "waiter",
    "waitress", "staff",    "owner",    "chef",     "kitchen",  "patio",    "parking",
    "lunch",    "dinner",   "breakfast", "brunch",  "order",    "ordered",  "plate",
    "portion",  "price",    "bill",     "tip",      "place",    "restaurant", "spot",
    "location", "visit",    "night",    "weekend",  "friday",   "saturday", "friends",
    "family",   "wife",     "husband",  "kids",     "birthday", "party",    "reservation",
    "drive",    "downtown", "street",   "corner",   "shrimp",   "salmon",   "tuna",
    "pork",     "beef",     "tofu",     "egg",      "bacon",    "wings",    "ramen",
    "pho",      "dumplings", "acai",    "bowl",     "smoothie", "buffalo",  "waffles",
    "pancakes", "omelette", "lemonade", "soda",     "water",    "napkins",  "booth",
    "counter",  "bar",      "music",    "tv",       "game",     "seat",     "seated",
    "came",     "went",     "got",      "tried",    "asked",    "said",     "time",
    "minutes",  "hour",     "first",    "second",   "last",     "again",    "also"};

constexpr std::array kFillerStopWords = {"the", "was", "and", "i",  "it",   "we",  "to",
                                         "of",  "a",   "very", "this", "our", "my", "with",
                                         "for", "is",  "were", "had", "they", "at"};

constexpr std::array kAmbienceKeys = {"romantic", "intimate", "classy",  "hipster", "divey",
                                      "touristy", "trendy",   "upscale", "casual"};
constexpr std::array kParkingKeys = {"garage", "street", "validated", "lot", "valet"};
constexpr std::array kDietaryKeys = {"dairy-free", "gluten-free", "vegan", "kosher",
                                     "halal",      "soy-free",    "vegetarian"};
constexpr std::array kUnknownRestaurantTags = {"Bars", "Coffee & Tea", "Desserts", "Juice Bars & Smoothies"};
constexpr std::array kUnknownOtherTags = {"Hair Salons", "Gyms", "Dentists", "Grocery",
                                          "Auto Repair", "Dry Cleaning"};

// Per-restaurant hidden state from which records and the planted score are derived.
struct Latent {
  int price = 0;  // 0 = attribute absent
  std::array<int, 9> ambience{};  // -1 absent, 0 false, 1 true
  int good_for_kids = -1, dogs_allowed = -1, outdoor_seating = -1, bike_parking = -1,
      has_tv = -1, reservations = -1, happy_hour = -1;
  std::string wifi, alcohol, attire;  // empty = absent
  std::array<int, 5> parking{};       // -1 absent
  std::array<int, 7> dietary{};       // -1 absent
  int photos = 0;
  int reviews = 0;
  double quality = 0.0;
  double checkin_rate = 1.0;
};

const char* py_bool(int v) { return v ? "True" : "False"; }

std::string py_dict(const auto& keys, const auto& values) {
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (values[i] < 0) continue;
    if (!first) out += ", ";
    first = false;
    out += "'";
    out += keys[i];
    out += "': ";
    out += py_bool(values[i]);
  }
  out += "}";
  return out;
}

// Yelp ships attribute values as Python literals inside JSON strings.
json attributes_json(const Latent& l, Rng& rng) {
  json a = json::object();
  if (l.price > 0) a["RestaurantsPriceRange2"] = std::to_string(l.price);
  if (std::any_of(l.ambience.begin(), l.ambience.end(), [](int v) { return v >= 0; })) {
    a["Ambience"] = py_dict(kAmbienceKeys, l.ambience);
  }
  auto flag = [&](const char* key, int v) {
    if (v >= 0) a[key] = py_bool(v);
  };
  flag("GoodForKids", l.good_for_kids);
  flag("DogsAllowed", l.dogs_allowed);
  flag("OutdoorSeating", l.outdoor_seating);
  flag("BikeParking", l.bike_parking);
  flag("HasTV", l.has_tv);
  flag("RestaurantsReservations", l.reservations);
  flag("HappyHour", l.happy_hour);
  auto quoted = [&](const std::string& v) { return (rng.bernoulli(0.5) ? "u'" : "'") + v + "'"; };
  if (!l.wifi.empty()) a["WiFi"] = quoted(l.wifi);
  if (!l.alcohol.empty()) a["Alcohol"] = quoted(l.alcohol);
  if (!l.attire.empty()) a["RestaurantsAttire"] = quoted(l.attire);
  if (std::any_of(l.parking.begin(), l.parking.end(), [](int v) { return v >= 0; })) {
    a["BusinessParking"] = py_dict(kParkingKeys, l.parking);
  }
  if (std::any_of(l.dietary.begin(), l.dietary.end(), [](int v) { return v >= 0; })) {
    a["DietaryRestrictions"] = py_dict(kDietaryKeys, l.dietary);
  }
  // Attributes that exist in real dumps but are not encoded.
  if (rng.bernoulli(0.6)) a["RestaurantsTakeOut"] = py_bool(rng.bernoulli(0.8));
  return a;
}

int tri(Rng& rng, double p_present, double p_true) {
  if (!rng.bernoulli(p_present)) return -1;
  return rng.bernoulli(p_true) ? 1 : 0;
}

std::string pick_enum(Rng& rng, double p_present, std::initializer_list<const char*> values,
                      std::initializer_list<double> weights) {
  if (!rng.bernoulli(p_present)) return {};
  std::discrete_distribution<std::size_t> d(weights);
  return *(values.begin() + d(rng.engine()));
}

Latent draw_latent(Rng& rng) {
  Latent l;
  if (rng.bernoulli(0.9)) {
    std::discrete_distribution<int> d({0.0, 0.35, 0.4, 0.17, 0.08});
    l.price = d(rng.engine());
  }
  const bool has_ambience = rng.bernoulli(0.8);
  for (auto& v : l.ambience) v = has_ambience ? (rng.bernoulli(0.3) ? 1 : 0) : -1;
  l.good_for_kids = tri(rng, 0.85, 0.7);
  l.dogs_allowed = tri(rng, 0.4, 0.3);
  l.outdoor_seating = tri(rng, 0.85, 0.45);
  l.bike_parking = tri(rng, 0.7, 0.6);
  l.has_tv = tri(rng, 0.8, 0.5);
  l.reservations = tri(rng, 0.85, 0.4);
  l.happy_hour = tri(rng, 0.5, 0.4);
  l.wifi = pick_enum(rng, 0.8, {"no", "free", "paid"}, {0.45, 0.5, 0.05});
  l.alcohol = pick_enum(rng, 0.8, {"none", "beer_and_wine", "full_bar"}, {0.45, 0.2, 0.35});
  l.attire = pick_enum(rng, 0.75, {"casual", "dressy", "formal"}, {0.85, 0.12, 0.03});
  const bool has_parking = rng.bernoulli(0.8);
  for (auto& v : l.parking) v = has_parking ? (rng.bernoulli(0.3) ? 1 : 0) : -1;
  const bool has_dietary = rng.bernoulli(0.1);
  for (auto& v : l.dietary) v = has_dietary ? (rng.bernoulli(0.25) ? 1 : 0) : -1;
  l.quality = rng.normal(3.7, 0.7);
  l.checkin_rate = std::exp(rng.normal(0.0, 0.5));
  return l;
}

// Raw value of a planted variable; NaN when undefined for this restaurant.
double latent_value(const Latent& l, const std::string& name) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto as01 = [](int v) { return v == 1 ? 1.0 : 0.0; };
  if (name == "price_range") return l.price > 0 ? l.price : nan;
  for (std::size_t i = 0; i < kAmbienceKeys.size(); ++i) {
    if (name == std::string("ambience_") + kAmbienceKeys[i]) return as01(l.ambience[i]);
  }
  if (name == "good_for_kids") return as01(l.good_for_kids);
  if (name == "dogs_allowed") return as01(l.dogs_allowed);
  if (name == "outdoor_seating") return as01(l.outdoor_seating);
  if (name == "bike_parking") return as01(l.bike_parking);
  if (name == "has_tv") return as01(l.has_tv);
  if (name == "takes_reservations") return as01(l.reservations);
  if (name == "happy_hour") return as01(l.happy_hour);
  if (name == "wifi_free") return l.wifi == "free" ? 1.0 : 0.0;
  if (name == "alcohol_full_bar") return l.alcohol == "full_bar" ? 1.0 : 0.0;
  if (name == "attire_dressy") return (l.attire == "dressy" || l.attire == "formal") ? 1.0 : 0.0;
  if (name == "parking_lot") return as01(l.parking[3]);
  if (name == "image_count") return l.photos;
  if (name == "review_count") return l.reviews;
  if (name == "mean_stars") return l.quality;
  if (name == "checkin_rate") return l.checkin_rate;
  return nan;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Geo {
  double lat, lon;
};

class Layout {
 public:
  Layout(const SynthConfig& c, Rng& rng) : config_(c) {
    for (int i = 0; i < std::max(1, c.districts); ++i) {
      centers_.push_back({rng.uniform(-0.5, 0.5) * c.extent_km, rng.uniform(-0.5, 0.5) * c.extent_km});
    }
  }

  Geo place(Rng& rng) const {
    double x, y;
    const double half = config_.extent_km / 2.0;
    if (rng.bernoulli(0.25)) {
      x = rng.uniform(-half, half);
      y = rng.uniform(-half, half);
    } else {
      const auto& c = centers_[rng.index(centers_.size())];
      const double sd = config_.extent_km / 12.0;
      x = std::clamp(c.first + rng.normal(0.0, sd), -half, half);
      y = std::clamp(c.second + rng.normal(0.0, sd), -half, half);
    }
    constexpr double kKmPerDegree = 6371.0 * std::numbers::pi / 180.0;
    const double lat = config_.center_latitude + y / kKmPerDegree;
    const double lon = config_.center_longitude +
                       x / (kKmPerDegree * std::cos(config_.center_latitude * std::numbers::pi / 180.0));
    return {std::clamp(lat, -90.0, 90.0), std::clamp(lon, -180.0, 180.0)};
  }

 private:
  const SynthConfig& config_;
  std::vector<std::pair<double, double>> centers_;
};

std::string make_id(const char* prefix, long long n) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%s-%07lld", prefix, n);
  return buf;
}

std::string review_text(int stars, Rng& rng) {
  const bool positive = stars >= 3;
  const int len = 12 + static_cast<int>(rng.index(20));
  std::string out;
  bool sentence_start = true;
  for (int i = 0; i < len; ++i) {
    const double u = rng.uniform();
    std::string word;
    if (u < 0.3) {
      word = kFillerStopWords[rng.index(kFillerStopWords.size())];
    } else if (u < 0.65) {
      word = positive ? kPositiveWords[rng.index(kPositiveWords.size())]
                      : kNegativeWords[rng.index(kNegativeWords.size())];
    } else {
      word = kNeutralWords[rng.index(kNeutralWords.size())];
    }
    if (sentence_start) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
    if (!out.empty()) out += ' ';
    out += word;
    sentence_start = false;
    const double p = rng.uniform();
    if (p < 0.08) {
      out += positive ? "!" : ".";
      sentence_start = true;
    } else if (p < 0.14) {
      out += ',';
    }
  }
  out += positive ? "!" : ".";
  return out;
}

Timestamp random_instant(Rng& rng, Timestamp from, Timestamp to) {
  const auto span = (to - from).count();
  if (span <= 0) return from;
  return from + std::chrono::seconds{static_cast<long long>(rng.uniform() * double(span))};
}

// Check-in at a day in [from, to) and an hour drawn from the venue's profile.
Timestamp checkin_instant(Rng& rng, Timestamp from, Timestamp to, const std::array<double, 24>& hours) {
  auto day = std::chrono::floor<std::chrono::days>(random_instant(rng, from, to));
  std::discrete_distribution<int> d(hours.begin(), hours.end());
  const int hour = d(rng.engine());
  auto t = std::chrono::time_point_cast<std::chrono::seconds>(day) +
           std::chrono::seconds{hour * 3600 + static_cast<int>(rng.index(3600))};
  return std::clamp(t, from, to - std::chrono::seconds{1});
}

std::array<double, 24> restaurant_hours(Rng& rng) {
  std::array<double, 24> h{};
  const int lunch = 11 + static_cast<int>(rng.index(3));
  const int dinner = 17 + static_cast<int>(rng.index(4));
  const double lunch_weight = rng.uniform(0.2, 0.8);
  for (int i = 0; i < 24; ++i) {
    h[i] = 0.01 + lunch_weight * std::exp(-0.5 * std::pow((i - lunch) / 1.2, 2)) +
           (1.0 - lunch_weight) * std::exp(-0.5 * std::pow((i - dinner) / 1.5, 2));
  }
  return h;
}

std::array<double, 24> business_hours(Rng& rng) {
  std::array<double, 24> h{};
  const int open = 7 + static_cast<int>(rng.index(4));
  const int close = 17 + static_cast<int>(rng.index(6));
  for (int i = 0; i < 24; ++i) h[i] = (i >= open && i < close) ? 1.0 : 0.02;
  return h;
}

void validate(const SynthConfig& c) {
  auto fail = [](const std::string& why) { throw DataError("infeasible synthetic config: " + why); };
  if (c.restaurants < 1) fail("restaurants must be >= 1");
  if (c.other_businesses < 0) fail("other_businesses must be >= 0");
  if (c.users < 1) fail("users must be >= 1");
  if (c.extra_reviews_per_restaurant < 0 || c.reviews_per_other_business < 0 ||
      c.checkins_per_restaurant < 0 || c.photos_per_restaurant < 0) {
    fail("rates must be nonnegative");
  }
  if (!(c.extent_km > 0)) fail("extent_km must be positive");
  if (!(c.history_start < c.observation_end && c.observation_end < c.prediction_end)) {
    fail("dates must satisfy history_start < observation_end < prediction_end");
  }
  if (!(c.closed_at_observation >= 0 && c.closed_at_observation < 1)) {
    fail("closed_at_observation must be in [0, 1)");
  }
  if (!(c.delisted_share >= 0 && c.delisted_share <= 1)) fail("delisted_share must be in [0, 1]");
  if (!(c.signal.base_survival > 0 && c.signal.base_survival < 1)) {
    fail("base_survival must be in (0, 1)");
  }
  if (!(c.signal.low_review_death_odds > 0)) fail("low_review_death_odds must be positive");
  const auto& known = planted_variables();
  for (const auto& [name, coef] : c.signal.coefficients) {
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      fail("unknown planted variable '" + name + "'");
    }
    if (!std::isfinite(coef)) fail("coefficient for '" + name + "' is not finite");
  }
}

}  // namespace

const std::vector<std::string>& planted_variables() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v = {"price_range"};
    for (const char* k : kAmbienceKeys) v.push_back(std::string("ambience_") + k);
    for (const char* k : {"good_for_kids", "dogs_allowed", "outdoor_seating", "bike_parking",
                          "has_tv", "takes_reservations", "happy_hour", "wifi_free",
                          "alcohol_full_bar", "attire_dressy", "parking_lot", "image_count",
                          "review_count", "mean_stars", "checkin_rate"}) {
      v.emplace_back(k);
    }
    return v;
  }();
  return names;
}

SyntheticCorpus generate_synthetic_corpus(const SynthConfig& config, std::uint64_t seed) {
  validate(config);
  Rng layout_rng(derive_seed(seed, "synth/layout"));
  Rng attr_rng(derive_seed(seed, "synth/attributes"));
  Rng review_rng(derive_seed(seed, "synth/reviews"));
  Rng checkin_rng(derive_seed(seed, "synth/checkins"));
  Rng fate_rng(derive_seed(seed, "synth/fate"));

  const auto& categories = NameManifest::categories();
  const auto& cuisines = NameManifest::cuisines();
  std::vector<std::string> other_categories;
  for (const auto& c : categories.names()) {
    if (c != "Restaurants") other_categories.push_back(c);
  }

  const Timestamp history = std::chrono::time_point_cast<std::chrono::seconds>(config.history_start);
  const Timestamp obs_end = end_of_day(config.observation_end);
  const Timestamp pred_end = end_of_day(config.prediction_end);
  const Timestamp latest_open = obs_end - std::chrono::days{90} > history
                                    ? obs_end - std::chrono::days{90}
                                    : history;

  Layout layout(config, layout_rng);
  const int n_rest = config.restaurants;
  const int n_other = config.other_businesses;

  std::vector<BusinessRecord> businesses;
  std::vector<Latent> latents;
  std::vector<Timestamp> opened;
  businesses.reserve(n_rest + n_other);

  // Cuisine popularity falls off like a Zipf law over manifest order, shuffled.
  std::vector<std::size_t> cuisine_order(cuisines.size());
  for (std::size_t i = 0; i < cuisine_order.size(); ++i) cuisine_order[i] = i;
  std::shuffle(cuisine_order.begin(), cuisine_order.end(), layout_rng.engine());
  std::vector<double> cuisine_weights(cuisines.size());
  for (std::size_t i = 0; i < cuisine_weights.size(); ++i) cuisine_weights[i] = 1.0 / double(i + 1);
  std::discrete_distribution<std::size_t> cuisine_pick(cuisine_weights.begin(), cuisine_weights.end());

  for (int i = 0; i < n_rest; ++i) {
    BusinessRecord b;
    b.business_id = make_id("rest", i);
    b.name = "Restaurant " + std::to_string(i);
    b.state = "AZ";
    auto g = layout.place(layout_rng);
    b.latitude = g.lat;
    b.longitude = g.lon;
    b.categories.push_back("Restaurants");
    std::set<std::size_t> picked;
    const int n_cuisines = layout_rng.bernoulli(0.3) ? 2 : 1;
    while (static_cast<int>(picked.size()) < n_cuisines) {
      picked.insert(cuisine_order[cuisine_pick(layout_rng.engine())]);
    }
    for (auto c : picked) b.categories.push_back(cuisines.name(c));
    if (layout_rng.bernoulli(0.2)) b.categories.push_back("Food");
    if (layout_rng.bernoulli(0.15)) b.categories.push_back("Nightlife");
    if (layout_rng.bernoulli(0.1)) {
      b.categories.push_back(kUnknownRestaurantTags[layout_rng.index(kUnknownRestaurantTags.size())]);
    }
    Latent l = draw_latent(attr_rng);
    l.reviews = 3 + review_rng.poisson(config.extra_reviews_per_restaurant);
    l.photos = attr_rng.poisson(config.photos_per_restaurant);
    b.attributes = attributes_json(l, attr_rng);
    latents.push_back(l);
    opened.push_back(random_instant(layout_rng, history, latest_open));
    businesses.push_back(std::move(b));
  }
  for (int i = 0; i < n_other; ++i) {
    BusinessRecord b;
    b.business_id = make_id("biz", i);
    b.name = "Business " + std::to_string(i);
    b.state = "AZ";
    auto g = layout.place(layout_rng);
    b.latitude = g.lat;
    b.longitude = g.lon;
    b.categories.push_back(other_categories[layout_rng.index(other_categories.size())]);
    if (layout_rng.bernoulli(0.3)) {
      auto second = other_categories[layout_rng.index(other_categories.size())];
      if (second != b.categories.front()) b.categories.push_back(second);
    }
    if (layout_rng.bernoulli(0.4)) {
      b.categories.push_back(kUnknownOtherTags[layout_rng.index(kUnknownOtherTags.size())]);
    }
    b.attributes = layout_rng.bernoulli(0.5) ? json::object({{"BusinessAcceptsCreditCards", "True"}})
                                              : json();
    opened.push_back(random_instant(layout_rng, history, latest_open));
    businesses.push_back(std::move(b));
  }

  // Reviews. Users are drawn with a skewed activity distribution so that
  // many users write several reviews and form transitions.
  auto pick_user = [&](Rng& rng) {
    const double u = rng.uniform();
    return make_id("user", static_cast<long long>(u * u * config.users));
  };
  std::vector<ReviewRecord> reviews;
  std::vector<int> obs_reviews(n_rest + n_other, 0);
  long long review_seq = 0;
  for (int i = 0; i < n_rest + n_other; ++i) {
    const bool restaurant = i < n_rest;
    const int count = restaurant ? latents[i].reviews
                                 : review_rng.poisson(config.reviews_per_other_business);
    const double quality = restaurant ? latents[i].quality : 3.8;
    obs_reviews[i] = count;
    for (int k = 0; k < count; ++k) {
      ReviewRecord r;
      r.review_id = make_id("rev", review_seq++);
      r.business_id = businesses[i].business_id;
      r.user_id = pick_user(review_rng);
      r.stars = std::clamp(static_cast<int>(std::lround(review_rng.normal(quality, 1.0))), 1, 5);
      r.timestamp = random_instant(review_rng, opened[i], obs_end);
      r.text = review_text(r.stars, review_rng);
      reviews.push_back(std::move(r));
    }
  }

  std::vector<CheckinRecord> checkins;
  for (int i = 0; i < n_rest + n_other; ++i) {
    const bool restaurant = i < n_rest;
    const auto hours = restaurant ? restaurant_hours(checkin_rng) : business_hours(checkin_rng);
    const double mean = restaurant ? config.checkins_per_restaurant * latents[i].checkin_rate
                                   : config.checkins_per_restaurant * 0.4;
    const int count = checkin_rng.poisson(mean);
    if (count == 0) continue;
    CheckinRecord c{businesses[i].business_id, {}};
    for (int k = 0; k < count; ++k) c.timestamps.push_back(checkin_instant(checkin_rng, opened[i], obs_end, hours));
    std::sort(c.timestamps.begin(), c.timestamps.end());
    checkins.push_back(std::move(c));
  }

  std::vector<PhotoRecord> photos;
  long long photo_seq = 0;
  for (int i = 0; i < n_rest; ++i) {
    for (int k = 0; k < latents[i].photos; ++k) {
      photos.push_back({make_id("photo", photo_seq++), businesses[i].business_id});
    }
  }

  // Planted survival model over standardized latent variables.
  std::vector<double> score(n_rest, 0.0);
  for (const auto& [name, coef] : config.signal.coefficients) {
    std::vector<double> raw(n_rest);
    double sum = 0.0;
    int n = 0;
    for (int i = 0; i < n_rest; ++i) {
      raw[i] = latent_value(latents[i], name);
      if (!std::isnan(raw[i])) {
        sum += raw[i];
        ++n;
      }
    }
    if (n == 0) continue;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : raw) {
      if (!std::isnan(v)) ss += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(ss / n);
    if (sd == 0.0) continue;
    for (int i = 0; i < n_rest; ++i) {
      if (!std::isnan(raw[i])) score[i] += coef * (raw[i] - mean) / sd;
    }
  }

  SyntheticCorpus out;
  const double base_logit = std::log(config.signal.base_survival / (1.0 - config.signal.base_survival));
  std::vector<BusinessRecord> later_businesses;
  std::vector<bool> survives(n_rest + n_other, true);
  for (int i = 0; i < n_rest; ++i) {
    PlantedTruth t;
    t.business_id = businesses[i].business_id;
    double s = score[i];
    if (latents[i].reviews < config.signal.review_threshold) s -= std::log(config.signal.low_review_death_odds);
    t.score = s;
    t.survival_probability = sigmoid(base_logit + s);
    t.open_at_observation = !fate_rng.bernoulli(config.closed_at_observation);
    t.survived = t.open_at_observation && fate_rng.bernoulli(t.survival_probability);
    businesses[i].is_open = t.open_at_observation;
    survives[i] = t.survived;
    out.truth.push_back(std::move(t));
  }
  for (int i = n_rest; i < n_rest + n_other; ++i) {
    businesses[i].is_open = !fate_rng.bernoulli(0.05);
    survives[i] = businesses[i].is_open && !fate_rng.bernoulli(0.1);
  }

  std::vector<ReviewRecord> later_reviews = reviews;
  for (int i = 0; i < n_rest + n_other; ++i) {
    BusinessRecord b = businesses[i];
    b.review_count = obs_reviews[i];
    businesses[i].review_count = obs_reviews[i];
    const bool closed_before = !businesses[i].is_open;
    if (i < n_rest && !closed_before && !survives[i] && fate_rng.bernoulli(config.delisted_share)) {
      continue;  // delisted
    }
    b.is_open = survives[i];
    if (survives[i]) {
      const int extra = review_rng.poisson(2.0);
      for (int k = 0; k < extra; ++k) {
        ReviewRecord r;
        r.review_id = make_id("rev", review_seq++);
        r.business_id = b.business_id;
        r.user_id = pick_user(review_rng);
        r.stars = std::clamp(static_cast<int>(std::lround(review_rng.normal(i < n_rest ? latents[i].quality : 3.8, 1.0))), 1, 5);
        r.timestamp = random_instant(review_rng, obs_end, pred_end);
        r.text = review_text(r.stars, review_rng);
        later_reviews.push_back(std::move(r));
        ++b.review_count;
      }
    }
    later_businesses.push_back(std::move(b));
  }

  out.observation = Snapshot(config.observation_end, businesses, std::move(reviews), checkins, photos);
  out.prediction = Snapshot(config.prediction_end, std::move(later_businesses), std::move(later_reviews),
                            std::move(checkins), std::move(photos));
  return out;
}

const std::map<std::string, double>& default_planted_coefficients() {
  static const std::map<std::string, double> c = {
      {"price_range", -1.5},    {"ambience_trendy", 1.8},     {"ambience_classy", 1.2}, {"outdoor_seating", 1.5},
      {"wifi_free", 1.2},       {"takes_reservations", -1.2}, {"happy_hour", 1.5},      {"has_tv", -1.0}};
  return c;
}

double planted_oracle_auc(const std::vector<PlantedTruth>& truth) {
  std::vector<double> p;
  for (const auto& t : truth) {
    if (t.open_at_observation) p.push_back(t.survival_probability);
  }
  std::sort(p.begin(), p.end());
  // E[#correctly ordered pairs] / E[#pos-neg pairs], pairs (i, j) with i positive.
  double num = 0.0, den = 0.0;
  double neg_below = 0.0;  // sum of (1 - p_j) over strictly smaller p_j
  std::size_t i = 0;
  while (i < p.size()) {
    std::size_t j = i;
    double group_neg = 0.0, group_pos = 0.0, group_cross = 0.0;
    while (j < p.size() && p[j] == p[i]) {
      group_neg += 1.0 - p[j];
      group_pos += p[j];
      group_cross += p[j] * (1.0 - p[j]);
      ++j;
    }
    // ties within a group count one half, excluding self pairs
    num += group_pos * neg_below + 0.5 * (group_pos * group_neg - group_cross);
    neg_below += group_neg;
    i = j;
  }
  double pos = 0.0, neg = 0.0, self = 0.0;
  for (double v : p) {
    pos += v;
    neg += 1.0 - v;
    self += v * (1.0 - v);
  }
  den = pos * neg - self;
  return den > 0 ? num / den : 0.5;
}

}  // namespace bizsurv::corpus
