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

#include "bizsurv/pipeline/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "bizsurv/common/error.hpp"
#include "bizsurv/common/io.hpp"
#include "bizsurv/common/rng.hpp"

extern char** environ;

namespace bizsurv::pipeline {
using nlohmann::json;

namespace {

// Free-form maps: their keys are not checked against the defaults.
bool is_open_map(const std::string& path) { return path == "synth.coefficients"; }

std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

std::string type_name(const json& v) {
  if (v.is_null()) return "null";
  if (v.is_boolean()) return "boolean";
  if (v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  return "object";
}

// Checks that `value` may replace `def` at `path`.
void check_type(const json& def, const json& value, const std::string& path) {
  bool ok;
  if (def.is_null()) {
    ok = value.is_null() || value.is_number();
  } else if (def.is_boolean()) {
    ok = value.is_boolean();
  } else if (def.is_number_integer()) {
    ok = value.is_number_integer() ||
         (value.is_number_float() && std::floor(value.get<double>()) == value.get<double>());
  } else if (def.is_number()) {
    ok = value.is_number();
  } else if (def.is_string()) {
    ok = value.is_string();
  } else if (def.is_array()) {
    ok = value.is_array() && std::all_of(value.begin(), value.end(), [](const json& e) { return e.is_string(); });
  } else {
    ok = value.is_object();
  }
  if (!ok) throw ConfigError(path, "expected " + type_name(def) + ", got " + type_name(value));
}

void merge_into(json& target, const json& source, const std::string& path) {
  if (!source.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, value] : source.items()) {
    const std::string p = join_path(path, key);
    if (is_open_map(path)) {
      target[key] = value;
      continue;
    }
    auto it = target.find(key);
    if (it == target.end()) throw ConfigError(p, "unknown field");
    check_type(*it, value, p);
    if (it->is_object() && !is_open_map(p)) {
      merge_into(*it, value, p);
    } else if (is_open_map(p)) {
      *it = value;
    } else {
      *it = value.is_number_float() && it->is_number_integer() ? json(value.get<long long>()) : value;
    }
  }
}

void flatten(const json& node, const std::string& path, std::vector<std::string>& out) {
  if (node.is_object() && !is_open_map(path)) {
    for (const auto& [k, v] : node.items()) flatten(v, join_path(path, k), out);
  } else {
    out.push_back(path);
  }
}

json* locate(json& root, const std::string& dotted) {
  json* cur = &root;
  std::size_t start = 0;
  while (true) {
    auto dot = dotted.find('.', start);
    cur = &(*cur)[dotted.substr(start, dot - start)];
    if (dot == std::string::npos) return cur;
    start = dot + 1;
  }
}

json parse_env_value(const json& def, const std::string& raw, const std::string& path) {
  if (def.is_string()) return raw;
  if (def.is_array()) {
    if (!raw.empty() && raw.front() == '[') {
      try {
        return json::parse(raw);
      } catch (const json::exception&) {
        throw ConfigError(path, "cannot parse '" + raw + "' as a JSON array");
      }
    }
    json arr = json::array();
    std::size_t start = 0;
    while (start <= raw.size()) {
      auto comma = raw.find(',', start);
      auto item = raw.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (!item.empty()) arr.push_back(item);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return arr;
  }
  try {
    return json::parse(raw);
  } catch (const json::exception&) {
    throw ConfigError(path, "cannot parse '" + raw + "' as " + type_name(def));
  }
}

const json& at_path(const json& doc, const std::string& dotted) {
  const json* cur = &doc;
  std::size_t start = 0;
  while (true) {
    auto dot = dotted.find('.', start);
    cur = &cur->at(dotted.substr(start, dot - start));
    if (dot == std::string::npos) return *cur;
    start = dot + 1;
  }
}

class Reader {
 public:
  explicit Reader(const json& doc) : doc_(doc) {}

  double number(const std::string& path) const {
    const auto& v = get(path);
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path, "must be finite");
    return d;
  }
  long long integer(const std::string& path) const {
    const auto& v = get(path);
    if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
    return v.get<long long>();
  }
  bool boolean(const std::string& path) const {
    const auto& v = get(path);
    if (!v.is_boolean()) throw ConfigError(path, "expected a boolean");
    return v.get<bool>();
  }
  std::string string(const std::string& path) const {
    const auto& v = get(path);
    if (!v.is_string()) throw ConfigError(path, "expected a string");
    return v.get<std::string>();
  }
  std::optional<double> optional_number(const std::string& path) const {
    if (get(path).is_null()) return std::nullopt;
    return number(path);
  }
  double positive(const std::string& path) const {
    double v = number(path);
    if (!(v > 0)) throw ConfigError(path, "must be positive");
    return v;
  }
  double non_negative(const std::string& path) const {
    double v = number(path);
    if (v < 0) throw ConfigError(path, "must not be negative");
    return v;
  }
  long long int_at_least(const std::string& path, long long lo) const {
    long long v = integer(path);
    if (v < lo) throw ConfigError(path, "must be at least " + std::to_string(lo));
    return v;
  }
  double fraction_open(const std::string& path) const {
    double v = number(path);
    if (!(v > 0 && v < 1)) throw ConfigError(path, "must lie strictly between 0 and 1");
    return v;
  }
  Date date(const std::string& path) const {
    auto d = parse_date(string(path));
    if (!d) throw ConfigError(path, "expected a YYYY-MM-DD date");
    return *d;
  }
  const json& get(const std::string& path) const {
    try {
      return at_path(doc_, path);
    } catch (const json::exception&) {
      throw ConfigError(path, "missing");
    }
  }

 private:
  const json& doc_;
};

}  // namespace

std::uint64_t RunConfig::stage_seed(std::string_view stage) const { return derive_seed(seed, stage); }

json default_config_json() {
  json coefficients = corpus::default_planted_coefficients();
  learn::HyperParams h;
  return json{
      {"paths", {{"workdir", "work"}, {"observation", ""}, {"prediction", ""}}},
      {"dates", {{"observation_end", "2017-12-31"}, {"prediction_end", "2019-12-31"}}},
      {"seed", 42},
      {"task", "survival"},
      {"synth",
       {{"restaurants", 1000},
        {"other_businesses", 600},
        {"users", 800},
        {"extra_reviews_per_restaurant", 5.0},
        {"reviews_per_other_business", 2.0},
        {"checkins_per_restaurant", 25.0},
        {"photos_per_restaurant", 1.5},
        {"extent_km", 8.0},
        {"districts", 12},
        {"history_start", "2012-01-01"},
        {"closed_at_observation", 0.15},
        {"delisted_share", 0.3},
        {"base_survival", 0.75},
        {"coefficients", coefficients},
        {"review_threshold", 0},
        {"low_review_death_odds", 1.0}}},
      {"geo", {{"radius_m", 500.0}}},
      {"mobility", {{"max_gap_hours", nullptr}, {"restrict_to_neighborhood", false}}},
      {"text", {{"vocab_size", 1000}, {"polarity_map", "three_up"}}},
      {"split", {{"test_fraction", 0.2}}},
      {"smote", {{"enabled", true}, {"k", 5}, {"amount", 1.0}}},
      {"train", {{"model", "GBDT"}, {"families", {"G", "U", "A", "L"}}}},
      {"models", learn::to_json(h)},
      {"explain",
       {{"top_k", 10},
        {"samples", 5000},
        {"text_samples", 3000},
        {"kernel_width", nullptr},
        {"text_kernel_width", 25.0},
        {"ridge_alpha", 1.0},
        {"mode", "quartile"},
        {"format", "json"}}},
  };
}

std::string env_name(const std::string& dotted_path) {
  std::string out = kEnvPrefix;
  for (char c : dotted_path) {
    out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

std::map<std::string, std::string> process_environment() {
  std::map<std::string, std::string> env;
  const std::string prefix = kEnvPrefix;
  for (char** e = environ; e && *e; ++e) {
    std::string entry(*e);
    if (entry.rfind(prefix, 0) != 0) continue;
    auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    env.emplace(entry.substr(0, eq), entry.substr(eq + 1));
  }
  return env;
}

RunConfig resolve_config(const std::optional<std::filesystem::path>& config_file,
                         const std::map<std::string, std::string>& environment, const json& cli_overrides) {
  json doc = default_config_json();
  if (config_file) {
    json user;
    try {
      user = json::parse(read_file(*config_file));
    } catch (const json::exception& e) {
      throw ConfigError("<config file>", config_file->string() + " is not valid JSON: " + e.what());
    } catch (const Error& e) {
      throw ConfigError("<config file>", e.what());
    }
    merge_into(doc, user, "");
  }

  std::vector<std::string> leaves;
  flatten(default_config_json(), "", leaves);
  std::map<std::string, std::string> by_env;
  for (const auto& leaf : leaves) by_env.emplace(env_name(leaf), leaf);
  for (const auto& [name, raw] : environment) {
    if (name.rfind(kEnvPrefix, 0) != 0) continue;
    auto it = by_env.find(name);
    if (it == by_env.end()) throw ConfigError(name, "environment override names no configuration field");
    const std::string& path = it->second;
    json* slot = locate(doc, path);
    json value = parse_env_value(*slot, raw, path);
    if (!is_open_map(path)) check_type(*slot, value, path);
    *slot = value;
  }

  if (!cli_overrides.is_null()) merge_into(doc, cli_overrides, "");
  return config_from_json(doc);
}

RunConfig config_from_json(const json& doc) {
  Reader r(doc);
  RunConfig c;
  c.resolved = doc;
  c.workdir = r.string("paths.workdir");
  if (c.workdir.empty()) throw ConfigError("paths.workdir", "must not be empty");
  c.observation_dir = r.string("paths.observation");
  c.prediction_dir = r.string("paths.prediction");
  c.observation_end = r.date("dates.observation_end");
  c.prediction_end = r.date("dates.prediction_end");
  if (!(c.observation_end < c.prediction_end)) {
    throw ConfigError("dates.prediction_end", "must come after dates.observation_end");
  }
  const auto& seed = r.get("seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
    throw ConfigError("seed", "expected a non-negative integer");
  }
  c.seed = seed.get<std::uint64_t>();
  const auto task = r.string("task");
  if (task == "survival") {
    c.task = Task::Survival;
  } else if (task == "sentiment") {
    c.task = Task::Sentiment;
  } else {
    throw ConfigError("task", "expected \"survival\" or \"sentiment\"");
  }

  auto& s = c.synth;
  s.restaurants = static_cast<int>(r.int_at_least("synth.restaurants", 1));
  s.other_businesses = static_cast<int>(r.int_at_least("synth.other_businesses", 0));
  s.users = static_cast<int>(r.int_at_least("synth.users", 1));
  s.extra_reviews_per_restaurant = r.non_negative("synth.extra_reviews_per_restaurant");
  s.reviews_per_other_business = r.non_negative("synth.reviews_per_other_business");
  s.checkins_per_restaurant = r.non_negative("synth.checkins_per_restaurant");
  s.photos_per_restaurant = r.non_negative("synth.photos_per_restaurant");
  s.extent_km = r.positive("synth.extent_km");
  s.districts = static_cast<int>(r.int_at_least("synth.districts", 1));
  s.history_start = r.date("synth.history_start");
  if (!(s.history_start < c.observation_end)) {
    throw ConfigError("synth.history_start", "must come before dates.observation_end");
  }
  s.observation_end = c.observation_end;
  s.prediction_end = c.prediction_end;
  s.closed_at_observation = r.number("synth.closed_at_observation");
  if (!(s.closed_at_observation >= 0 && s.closed_at_observation < 1)) {
    throw ConfigError("synth.closed_at_observation", "must lie in [0, 1)");
  }
  s.delisted_share = r.number("synth.delisted_share");
  if (!(s.delisted_share >= 0 && s.delisted_share <= 1)) {
    throw ConfigError("synth.delisted_share", "must lie in [0, 1]");
  }
  s.signal.base_survival = r.fraction_open("synth.base_survival");
  s.signal.review_threshold = static_cast<int>(r.int_at_least("synth.review_threshold", 0));
  s.signal.low_review_death_odds = r.positive("synth.low_review_death_odds");
  s.signal.coefficients.clear();
  const auto& known = corpus::planted_variables();
  for (const auto& [name, value] : r.get("synth.coefficients").items()) {
    const std::string path = "synth.coefficients." + name;
    if (std::find(known.begin(), known.end(), name) == known.end()) throw ConfigError(path, "unknown planted variable");
    s.signal.coefficients[name] = r.number(path);
  }

  c.radius_m = r.positive("geo.radius_m");
  if (auto gap = r.optional_number("mobility.max_gap_hours")) {
    if (!(*gap > 0)) throw ConfigError("mobility.max_gap_hours", "must be positive or null");
    c.mobility.max_gap = std::chrono::seconds(static_cast<long long>(std::llround(*gap * 3600.0)));
  }
  c.mobility.restrict_to_neighborhood = r.boolean("mobility.restrict_to_neighborhood");
  c.mobility.radius_m = c.radius_m;
  c.vocab_size = static_cast<std::size_t>(r.int_at_least("text.vocab_size", 1));
  auto pm = text::parse_polarity_map(r.string("text.polarity_map"));
  if (!pm) throw ConfigError("text.polarity_map", "expected \"three_up\" or \"drop_three\"");
  c.polarity_map = *pm;

  c.test_fraction = r.fraction_open("split.test_fraction");
  c.smote = r.boolean("smote.enabled");
  c.smote_k = static_cast<std::size_t>(r.int_at_least("smote.k", 1));
  c.smote_amount = r.positive("smote.amount");

  auto kind = learn::parse_model_kind(r.string("train.model"));
  if (!kind) throw ConfigError("train.model", "expected one of LR, GBDT, MLP");
  c.model = *kind;
  std::set<std::string> seen;
  for (const auto& f : r.get("train.families")) {
    auto name = f.get<std::string>();
    if (name != "G" && name != "U" && name != "A" && name != "L") {
      throw ConfigError("train.families", "unknown feature family '" + name + "' (expected G, U, A, L)");
    }
    if (!seen.insert(name).second) throw ConfigError("train.families", "duplicate family '" + name + "'");
    c.families.push_back(name);
  }
  if (c.families.empty()) throw ConfigError("train.families", "must name at least one family");

  auto& h = c.hyper;
  h.lr.l2 = r.non_negative("models.lr.l2");
  h.lr.max_iter = static_cast<int>(r.int_at_least("models.lr.max_iter", 0));
  h.lr.tolerance = r.positive("models.lr.tolerance");
  h.gbdt.trees = static_cast<int>(r.int_at_least("models.gbdt.trees", 0));
  h.gbdt.depth = static_cast<int>(r.int_at_least("models.gbdt.depth", 1));
  h.gbdt.learning_rate = r.positive("models.gbdt.learning_rate");
  h.gbdt.max_bins = static_cast<int>(r.int_at_least("models.gbdt.max_bins", 2));
  if (h.gbdt.max_bins > 256) throw ConfigError("models.gbdt.max_bins", "must be at most 256");
  h.gbdt.lambda = r.non_negative("models.gbdt.lambda");
  h.gbdt.min_child_hessian = r.non_negative("models.gbdt.min_child_hessian");
  h.mlp.hidden = static_cast<int>(r.int_at_least("models.mlp.hidden", 1));
  h.mlp.epochs = static_cast<int>(r.int_at_least("models.mlp.epochs", 0));
  h.mlp.batch_size = static_cast<int>(r.int_at_least("models.mlp.batch_size", 1));
  h.mlp.learning_rate = r.positive("models.mlp.learning_rate");
  h.mlp.momentum = r.non_negative("models.mlp.momentum");
  if (h.mlp.momentum >= 1) throw ConfigError("models.mlp.momentum", "must be below 1");
  h.mlp.l2 = r.non_negative("models.mlp.l2");

  auto& e = c.explain;
  e.top_k = static_cast<std::size_t>(r.int_at_least("explain.top_k", 1));
  e.samples = static_cast<std::size_t>(r.int_at_least("explain.samples", 2));
  e.text_samples = static_cast<std::size_t>(r.int_at_least("explain.text_samples", 2));
  e.kernel_width = r.optional_number("explain.kernel_width");
  if (e.kernel_width && !(*e.kernel_width > 0)) throw ConfigError("explain.kernel_width", "must be positive or null");
  e.text_kernel_width = r.positive("explain.text_kernel_width");
  e.ridge_alpha = r.non_negative("explain.ridge_alpha");
  const auto mode = r.string("explain.mode");
  if (mode == "quartile") {
    e.mode = explain::TabularMode::Quartile;
  } else if (mode == "continuous") {
    e.mode = explain::TabularMode::Continuous;
  } else {
    throw ConfigError("explain.mode", "expected \"quartile\" or \"continuous\"");
  }
  e.format = r.string("explain.format");
  const auto& formats = explain::render_formats();
  if (std::find(formats.begin(), formats.end(), e.format) == formats.end()) {
    throw ConfigError("explain.format", "expected \"json\" or \"html\"");
  }
  return c;
}

}  // namespace bizsurv::pipeline
