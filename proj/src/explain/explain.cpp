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

#include "bizsurv/explain/explain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_map>

#include <Eigen/Dense>

#include "bizsurv/common/error.hpp"
#include "bizsurv/common/rng.hpp"

namespace bizsurv::explain {
using nlohmann::json;

namespace {

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  std::string s(buf);
  return s == "-0" ? "0" : s;
}

// Indices of the k largest |values|, ties by index.
std::vector<std::size_t> top_by_magnitude(std::span<const double> values, std::size_t k) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(values[a]) > std::abs(values[b]); });
  if (idx.size() > k) idx.resize(k);
  return idx;
}

Matrix select_columns(const Matrix& Z, std::span<const std::size_t> cols) {
  Matrix out(Z.rows(), cols.size());
  for (std::size_t r = 0; r < Z.rows(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = Z(r, cols[c]);
  }
  return out;
}

struct Surrogate {
  std::vector<std::size_t> selected;  // into the regressor columns, by |weight|
  WeightedRidge fit;                  // refit on `selected`, same order
};

// Full ridge fit, top-k selection by magnitude, refit on the selection.
Surrogate fit_surrogate(const Matrix& Z, std::span<const double> y, std::span<const double> w, double alpha,
                        std::size_t k) {
  Surrogate s;
  auto full = weighted_ridge(Z, y, w, alpha);
  s.selected = top_by_magnitude(full.coefficients, k);
  if (s.selected.size() == Z.cols()) {
    WeightedRidge ordered = full;
    ordered.coefficients.clear();
    for (auto i : s.selected) ordered.coefficients.push_back(full.coefficients[i]);
    s.fit = ordered;
  } else {
    s.fit = weighted_ridge(select_columns(Z, s.selected), y, w, alpha);
  }
  // Keep the reported order consistent with the refit magnitudes.
  auto order = top_by_magnitude(s.fit.coefficients, s.selected.size());
  std::vector<std::size_t> sel;
  std::vector<double> coef;
  for (auto i : order) {
    sel.push_back(s.selected[i]);
    coef.push_back(s.fit.coefficients[i]);
  }
  s.selected = std::move(sel);
  s.fit.coefficients = std::move(coef);
  return s;
}

std::string html_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void check_format(std::string_view format) {
  const auto& f = render_formats();
  if (std::find(f.begin(), f.end(), format) == f.end()) {
    std::string list;
    for (const auto& name : f) list += (list.empty() ? "" : ", ") + name;
    throw Error("unknown explanation format '" + std::string(format) + "'; supported: " + list);
  }
}

bool all_negligible(std::span<const double> weights) {
  return std::all_of(weights.begin(), weights.end(), [](double w) { return std::abs(w) < kSalienceFloor; });
}

}  // namespace

ProbabilityFn probability_fn(const learn::TrainedModel& model) {
  return [&model](const Matrix& X) { return model.predict_rows(X); };
}

WeightedRidge weighted_ridge(const Matrix& Z, std::span<const double> y, std::span<const double> weights,
                             double alpha) {
  const auto n = static_cast<Eigen::Index>(Z.rows());
  const auto d = static_cast<Eigen::Index>(Z.cols());
  WeightedRidge out;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> Zm(Z.data().data(), n, d);
  Eigen::Map<const Eigen::VectorXd> yv(y.data(), n), wv(weights.data(), n);
  const double wsum = wv.sum();
  if (n == 0 || wsum <= 0.0) throw DataError("weighted ridge needs samples with positive weight");
  const double ybar = wv.dot(yv) / wsum;
  Eigen::RowVectorXd zbar = (wv.transpose() * Zm) / wsum;
  Eigen::MatrixXd Zc = Zm.rowwise() - zbar;
  Eigen::VectorXd yc = yv.array() - ybar;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
  if (d > 0) {
    Eigen::MatrixXd A = Zc.transpose() * wv.asDiagonal() * Zc;
    A.diagonal().array() += alpha;
    Eigen::VectorXd rhs = Zc.transpose() * (wv.asDiagonal() * yc);
    beta = A.ldlt().solve(rhs);
  }
  out.coefficients.assign(beta.data(), beta.data() + d);
  out.intercept = ybar - zbar.dot(beta);
  Eigen::VectorXd resid = yc - Zc * beta;
  const double ss_res = wv.dot(resid.cwiseProduct(resid));
  const double ss_tot = wv.dot(yc.cwiseProduct(yc));
  if (ss_tot <= 1e-24 * wsum) {
    out.r2 = 1.0;
  } else {
    out.r2 = std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
  }
  return out;
}

std::vector<double> quartile_edges(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<double> edges;
  if (values.empty()) return edges;
  for (double q : {0.25, 0.5, 0.75}) {
    double pos = q * static_cast<double>(values.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = std::min(lo + 1, values.size() - 1);
    double v = values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
    if (edges.empty() || v > edges.back()) edges.push_back(v);
  }
  return edges;
}

std::size_t bin_of(std::span<const double> edges, double value) {
  return static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), value) - edges.begin());
}

TabularExplanation explain_tabular(const ProbabilityFn& model, std::span<const double> x,
                                   const std::string& instance_id, const std::vector<std::string>& columns,
                                   const Matrix& background, const TabularConfig& config) {
  const std::size_t F = columns.size();
  if (x.size() != F) throw DataError("instance width does not match the feature schema");
  if (background.rows() == 0) throw DataError("explanations need a nonempty background sample");
  if (background.cols() != F) throw DataError("background width does not match the feature schema");
  if (config.num_samples < 2) throw DataError("explanations need at least two samples");

  TabularExplanation e;
  e.instance_id = instance_id;
  e.mode = config.mode == TabularMode::Quartile ? "quartile" : "continuous";
  e.num_samples = config.num_samples;
  e.ridge_alpha = config.ridge_alpha;
  e.seed = config.seed;

  // Per-feature background statistics.
  const std::size_t B = background.rows();
  std::vector<std::size_t> active;
  std::vector<bool> categorical(F, false);
  std::vector<std::vector<double>> edges(F);
  std::vector<double> mean(F, 0.0), sd(F, 0.0);
  for (std::size_t j = 0; j < F; ++j) {
    std::vector<double> col(B);
    for (std::size_t r = 0; r < B; ++r) col[r] = background(r, j);
    std::vector<double> uniq = col;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    if (uniq.size() < 2) {
      e.excluded_features.push_back(columns[j]);
      continue;
    }
    active.push_back(j);
    categorical[j] = uniq.size() == 2;
    if (!categorical[j]) edges[j] = quartile_edges(col);
    mean[j] = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(B);
    double v = 0.0;
    for (double c : col) v += (c - mean[j]) * (c - mean[j]);
    sd[j] = std::sqrt(v / static_cast<double>(B));
    if (sd[j] <= 0.0) sd[j] = 1.0;
  }
  const std::size_t A = active.size();
  e.kernel_width = config.kernel_width.value_or(0.75 * std::sqrt(static_cast<double>(std::max<std::size_t>(A, 1))));

  const std::size_t n = config.num_samples;
  Matrix raw(n, F);
  Matrix Z(n, A);
  std::vector<double> weights(n);
  Rng rng(config.seed);
  std::vector<double> x_scaled(F);
  for (std::size_t j = 0; j < F; ++j) x_scaled[j] = (x[j] - mean[j]) / (sd[j] > 0 ? sd[j] : 1.0);

  for (std::size_t s = 0; s < n; ++s) {
    auto row = raw.row(s);
    std::copy(x.begin(), x.end(), row.begin());
    double d2 = 0.0;
    for (std::size_t a = 0; a < A; ++a) {
      const std::size_t j = active[a];
      double z;
      if (config.mode == TabularMode::Quartile) {
        if (s > 0) row[j] = background(rng.index(B), j);
        const bool same = categorical[j] ? row[j] == x[j] : bin_of(edges[j], row[j]) == bin_of(edges[j], x[j]);
        z = same ? 1.0 : 0.0;
        d2 += 1.0 - z;
      } else {
        if (s > 0) row[j] = mean[j] + sd[j] * rng.normal();
        z = (row[j] - mean[j]) / sd[j];
        d2 += (z - x_scaled[j]) * (z - x_scaled[j]);
      }
      Z(s, a) = z;
    }
    weights[s] = std::exp(-d2 / (e.kernel_width * e.kernel_width));
  }

  const auto probs = model(raw);
  if (probs.size() != n) throw DataError("model returned the wrong number of predictions");
  e.probability = probs[0];
  e.predicted_class = probs[0] >= 0.5 ? 1 : 0;
  e.predicted_label = config.class_names[e.predicted_class];

  const auto surrogate = fit_surrogate(Z, probs, weights, config.ridge_alpha, config.top_k);
  e.intercept = surrogate.fit.intercept;
  e.local_fit_r2 = surrogate.fit.r2;
  for (std::size_t i = 0; i < surrogate.selected.size(); ++i) {
    const std::size_t j = active[surrogate.selected[i]];
    TabularEntry entry;
    entry.feature = columns[j];
    entry.value = x[j];
    entry.weight = surrogate.fit.coefficients[i];
    if (config.mode == TabularMode::Continuous) {
      entry.condition = columns[j];
    } else if (categorical[j]) {
      entry.condition = columns[j] + " = " + short_number(x[j]);
    } else {
      const auto& ed = edges[j];
      const std::size_t b = bin_of(ed, x[j]);
      if (b == 0) {
        entry.condition = columns[j] + " <= " + short_number(ed.front());
      } else if (b == ed.size()) {
        entry.condition = columns[j] + " > " + short_number(ed.back());
      } else {
        entry.condition = short_number(ed[b - 1]) + " < " + columns[j] + " <= " + short_number(ed[b]);
      }
    }
    e.entries.push_back(std::move(entry));
  }
  return e;
}

TabularExplanation explain_tabular(const learn::TrainedModel& model, std::span<const double> x,
                                   const std::string& instance_id, const Matrix& background,
                                   const TabularConfig& config) {
  return explain_tabular(probability_fn(model), x, instance_id, model.columns(), background, config);
}

TextExplanation explain_text(const ProbabilityFn& model, const std::vector<std::string>& columns,
                             std::string_view text, const std::string& review_id,
                             const TextExplainConfig& config) {
  std::unordered_map<std::string, std::size_t> column_of;
  for (std::size_t c = 0; c < columns.size(); ++c) column_of.emplace(columns[c], c);

  std::vector<std::string> distinct;
  std::vector<std::size_t> token_column;
  std::vector<double> token_count;
  std::unordered_map<std::string, std::size_t> seen;
  for (const auto& t : text::preprocess(text)) {
    auto col = column_of.find(text::bow_column(t));
    if (col == column_of.end()) continue;
    auto [it, inserted] = seen.emplace(t, distinct.size());
    if (inserted) {
      distinct.push_back(t);
      token_column.push_back(col->second);
      token_count.push_back(0.0);
    }
    token_count[it->second] += 1.0;
  }
  if (distinct.empty()) throw DataError("unexplainable input: no in-vocabulary tokens");
  if (config.num_samples < 2) throw DataError("explanations need at least two samples");

  const std::size_t m = distinct.size(), n = config.num_samples;
  Matrix Z(n, m);
  Matrix bow(n, columns.size());
  std::vector<double> weights(n);
  Rng rng(config.seed);
  for (std::size_t s = 0; s < n; ++s) {
    std::size_t kept = 0;
    for (std::size_t t = 0; t < m; ++t) {
      const bool keep = s == 0 || rng.bernoulli(0.5);
      Z(s, t) = keep ? 1.0 : 0.0;
      if (keep) {
        ++kept;
        bow(s, token_column[t]) = token_count[t];
      }
    }
    const double cosine = kept == 0 ? 0.0 : std::sqrt(static_cast<double>(kept) / static_cast<double>(m));
    const double d = 100.0 * (1.0 - cosine);
    weights[s] = std::exp(-(d * d) / (config.kernel_width * config.kernel_width));
  }
  const auto probs = model(bow);
  if (probs.size() != n) throw DataError("model returned the wrong number of predictions");

  TextExplanation e;
  e.review_id = review_id;
  e.source_text = std::string(text);
  e.probability = probs[0];
  e.predicted_class = probs[0] >= 0.5 ? 1 : 0;
  e.predicted_label = config.class_names[e.predicted_class];
  e.kernel_width = config.kernel_width;
  e.num_samples = n;
  e.ridge_alpha = config.ridge_alpha;
  e.seed = config.seed;
  const auto surrogate = fit_surrogate(Z, probs, weights, config.ridge_alpha, config.top_k);
  e.intercept = surrogate.fit.intercept;
  e.local_fit_r2 = surrogate.fit.r2;
  for (std::size_t i = 0; i < surrogate.selected.size(); ++i) {
    e.word_weights.emplace_back(distinct[surrogate.selected[i]], surrogate.fit.coefficients[i]);
  }
  return e;
}

TextExplanation explain_text(const learn::TrainedModel& model, std::string_view text,
                             const std::string& review_id, const TextExplainConfig& config) {
  return explain_text(probability_fn(model), model.columns(), text, review_id, config);
}

json TabularExplanation::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = "tabular";
  j["instance_id"] = instance_id;
  j["predicted_class"] = predicted_label;
  j["probability"] = probability;
  auto arr = nlohmann::ordered_json::array();
  std::vector<double> w;
  for (const auto& en : entries) {
    nlohmann::ordered_json item;
    item["feature"] = en.feature;
    item["condition"] = en.condition;
    item["value"] = en.value;
    item["weight"] = en.weight;
    arr.push_back(item);
    w.push_back(en.weight);
  }
  j["entries"] = arr;
  j["intercept"] = intercept;
  j["local_fit_r2"] = local_fit_r2;
  if (all_negligible(w)) j["notice"] = "no salient features";
  j["config"] = {{"mode", mode},
                 {"kernel_width", kernel_width},
                 {"num_samples", num_samples},
                 {"ridge_alpha", ridge_alpha},
                 {"seed", seed}};
  j["excluded_features"] = excluded_features;
  return json::parse(j.dump());
}

json TextExplanation::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = "text";
  j["review_id"] = review_id;
  j["predicted_class"] = predicted_label;
  j["probability"] = probability;
  auto arr = nlohmann::ordered_json::array();
  std::vector<double> w;
  for (const auto& [token, weight] : word_weights) {
    arr.push_back(nlohmann::ordered_json{{"token", token}, {"weight", weight}});
    w.push_back(weight);
  }
  j["word_weights"] = arr;
  j["intercept"] = intercept;
  j["local_fit_r2"] = local_fit_r2;
  if (all_negligible(w)) j["notice"] = "no salient features";
  j["config"] = {{"kernel_width", kernel_width},
                 {"num_samples", num_samples},
                 {"ridge_alpha", ridge_alpha},
                 {"seed", seed}};
  return json::parse(j.dump());
}

const std::vector<std::string>& render_formats() {
  static const std::vector<std::string> formats = {"json", "html"};
  return formats;
}

std::string render_explanation(const TabularExplanation& e, std::string_view format) {
  check_format(format);
  if (format == "json") return e.to_json().dump(2) + "\n";

  std::string out = "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>" + html_escape(e.instance_id) +
                    "</title></head>\n<body>\n";
  out += "<h1>" + html_escape(e.instance_id) + "</h1>\n";
  out += "<p>Predicted: " + html_escape(e.predicted_label) + " (p = " + short_number(e.probability) +
         ", local fit R&sup2; = " + short_number(e.local_fit_r2) + ")</p>\n";
  std::vector<double> w;
  for (const auto& en : e.entries) w.push_back(en.weight);
  if (all_negligible(w)) {
    out += "<p class=\"notice\">no salient features</p>\n</body></html>\n";
    return out;
  }
  double max_abs = 0.0;
  for (double v : w) max_abs = std::max(max_abs, std::abs(v));
  const int row_h = 24, label_w = 320, bar_w = 240;
  const int height = row_h * static_cast<int>(e.entries.size()) + 10;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(label_w + 2 * bar_w + 20) +
         "\" height=\"" + std::to_string(height) + "\">\n";
  const int axis = label_w + bar_w;
  out += "<line x1=\"" + std::to_string(axis) + "\" y1=\"0\" x2=\"" + std::to_string(axis) + "\" y2=\"" +
         std::to_string(height) + "\" stroke=\"#444\"/>\n";
  for (std::size_t i = 0; i < e.entries.size(); ++i) {
    const auto& en = e.entries[i];
    const int y = static_cast<int>(i) * row_h + 5;
    const int len = static_cast<int>(std::round(std::abs(en.weight) / max_abs * bar_w));
    const bool pos = en.weight > 0;
    const int x0 = pos ? axis : axis - len;
    out += "<text x=\"0\" y=\"" + std::to_string(y + 15) + "\" font-size=\"12\">" + html_escape(en.condition) +
           "</text>\n";
    out += "<rect x=\"" + std::to_string(x0) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
           std::to_string(len) + "\" height=\"" + std::to_string(row_h - 6) + "\" fill=\"" +
           (pos ? "#2ca02c" : "#d62728") + "\"><title>" + short_number(en.weight) + "</title></rect>\n";
  }
  out += "</svg>\n<p>Green bars push toward the positive class, red bars away from it.</p>\n";
  out += "</body></html>\n";
  return out;
}

std::string render_explanation(const TextExplanation& e, std::string_view format) {
  check_format(format);
  if (format == "json") return e.to_json().dump(2) + "\n";

  std::unordered_map<std::string, double> weight_of;
  std::vector<double> w;
  for (const auto& [t, v] : e.word_weights) {
    weight_of[t] = v;
    w.push_back(v);
  }
  std::string out = "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>" + html_escape(e.review_id) +
                    "</title></head>\n<body>\n";
  out += "<h1>" + html_escape(e.review_id) + "</h1>\n";
  out += "<p>Predicted: " + html_escape(e.predicted_label) + " (p = " + short_number(e.probability) + ")</p>\n";
  if (all_negligible(w)) out += "<p class=\"notice\">no salient features</p>\n";
  out += "<p class=\"text\">";
  // Re-tokenize word by word so each highlighted span is one source token.
  std::size_t i = 0;
  const std::string& s = e.source_text;
  while (i < s.size()) {
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) {
      std::string word = s.substr(i, j - i);
      auto toks = text::preprocess(word);
      auto it = toks.size() == 1 ? weight_of.find(toks[0]) : weight_of.end();
      if (it != weight_of.end() && std::abs(it->second) >= kSalienceFloor) {
        out += "<span data-token=\"" + html_escape(toks[0]) + "\" style=\"background:" +
               (it->second > 0 ? "#ff7f0e" : "#1f77b4") + "\">" + html_escape(word) + "</span>";
      } else {
        out += html_escape(word);
      }
    }
    while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) out += s[j++];
    i = j;
  }
  out += "</p>\n<ul>\n";
  for (const auto& [t, v] : e.word_weights) {
    out += "<li>" + html_escape(t) + ": " + short_number(v) + "</li>\n";
  }
  out += "</ul>\n</body></html>\n";
  return out;
}

}  // namespace bizsurv::explain
