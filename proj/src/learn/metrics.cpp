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

#include "bizsurv/learn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bizsurv/common/error.hpp"

namespace bizsurv::learn {
using nlohmann::json;

EvalReport roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw DataError("scores and labels differ in length");
  EvalReport rep;
  for (int l : labels) (l == 1 ? rep.positives : rep.negatives) += 1;
  if (rep.positives == 0) throw DataError("AUC undefined: no samples of the positive class (1)");
  if (rep.negatives == 0) throw DataError("AUC undefined: no samples of the negative class (0)");

  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
  });

  // Walk thresholds from high to low. Each tie group moves the curve once;
  // the trapezoid over a group credits tied pairs with one half.
  const double P = static_cast<double>(rep.positives), N = static_cast<double>(rep.negatives);
  double tp = 0.0, fp = 0.0, area = 0.0;
  rep.roc.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t i = 0;
  while (i < n) {
    const double s = scores[order[i]];
    double gp = 0.0, gn = 0.0;
    while (i < n && scores[order[i]] == s) {
      (labels[order[i]] == 1 ? gp : gn) += 1.0;
      ++i;
    }
    area += gn * (tp + gp / 2.0);
    tp += gp;
    fp += gn;
    rep.roc.push_back({fp / N, tp / P, s});
  }
  rep.auc = area / (P * N);
  return rep;
}

json EvalReport::to_json() const {
  json roc_json = json::array();
  for (const auto& p : roc) {
    roc_json.push_back(json{{"fpr", p.fpr}, {"tpr", p.tpr},
                            {"threshold", std::isinf(p.threshold) ? json("inf") : json(p.threshold)}});
  }
  json j;
  j["auc"] = auc;
  j["positives"] = positives;
  j["negatives"] = negatives;
  j["roc"] = roc_json;
  if (!config.is_null()) j["config"] = config;
  return j;
}

VoteResult majority_vote(const std::vector<std::vector<double>>& members) {
  VoteResult out;
  if (members.empty()) return out;
  const std::size_t n = members.front().size();
  for (const auto& m : members) {
    if (m.size() != n) throw DataError("ensemble members predict different row counts");
  }
  const auto k = static_cast<double>(members.size());
  out.labels.resize(n);
  out.scores.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    double votes = 0.0, sum = 0.0;
    for (const auto& m : members) {
      votes += m[r] >= 0.5 ? 1.0 : 0.0;
      sum += m[r];
    }
    const double mean = sum / k;
    out.scores[r] = mean;
    if (2.0 * votes > k) {
      out.labels[r] = 1;
    } else if (2.0 * votes < k) {
      out.labels[r] = 0;
    } else {
      out.labels[r] = mean >= 0.5 ? 1 : 0;
    }
  }
  return out;
}

}  // namespace bizsurv::learn
