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

#include "bizsurv/learn/smote.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bizsurv/common/error.hpp"

namespace bizsurv::learn {

std::vector<std::vector<std::size_t>> nearest_neighbors(const Matrix& points, std::size_t k,
                                                        std::span<const double> scale) {
  const std::size_t n = points.rows(), d = points.cols();
  k = std::min(k, n == 0 ? 0 : n - 1);
  Matrix scaled = points;
  if (!scale.empty()) {
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < d; ++c) scaled(r, c) /= scale[c];
    }
  }
  std::vector<std::vector<std::size_t>> out(n);
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    dist.clear();
    auto a = scaled.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      auto b = scaled.row(j);
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        double t = a[c] - b[c];
        s += t * t;
      }
      dist.emplace_back(s, j);
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    for (std::size_t m = 0; m < k; ++m) out[i].push_back(dist[m].second);
  }
  return out;
}

std::size_t smote_count(std::size_t minority, std::size_t majority, double amount) {
  auto target = static_cast<long long>(std::llround(amount * static_cast<double>(majority)));
  return target > static_cast<long long>(minority) ? static_cast<std::size_t>(target - minority) : 0;
}

SmoteResult smote(const Matrix& minority, std::size_t k, std::size_t count, Rng& rng,
                  std::span<const double> scale) {
  SmoteResult res;
  const std::size_t m = minority.rows();
  res.rows = Matrix(0, minority.cols());
  if (count == 0) return res;
  if (m < 2) throw DataError("SMOTE needs at least two minority samples, got " + std::to_string(m));
  if (m <= k) {
    res.warnings.push_back("minority class has " + std::to_string(m) + " samples; k lowered from " +
                           std::to_string(k) + " to " + std::to_string(m - 1));
    k = m - 1;
  }
  res.k_used = k;
  const auto neighbors = nearest_neighbors(minority, k, scale);

  std::vector<std::size_t> seeds;
  seeds.reserve(count);
  for (std::size_t round = 0; round < count / m; ++round) {
    for (std::size_t i = 0; i < m; ++i) seeds.push_back(i);
  }
  if (std::size_t rest = count % m) {
    std::vector<std::size_t> pool(m);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = 0; i < rest; ++i) {
      std::swap(pool[i], pool[i + rng.index(m - i)]);
      seeds.push_back(pool[i]);
    }
  }

  std::vector<double> row(minority.cols());
  for (std::size_t s : seeds) {
    std::size_t nn = neighbors[s][rng.index(k)];
    double u = rng.uniform();
    auto a = minority.row(s);
    auto b = minority.row(nn);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = a[c] + u * (b[c] - a[c]);
    res.rows.append_row(row);
    res.seed.push_back(s);
    res.neighbor.push_back(nn);
    res.u.push_back(u);
  }
  return res;
}

OversampledDataset oversample(const Dataset& train, double amount, std::size_t k, std::uint64_t seed) {
  OversampledDataset out;
  const std::size_t pos = train.count(1), neg = train.count(0);
  out.minority_label = pos < neg ? 1 : 0;
  out.data = train;
  for (std::size_t i = 0; i < train.rows(); ++i) {
    if (train.y[i] == out.minority_label) out.minority_rows.push_back(i);
  }
  const std::size_t count = smote_count(std::min(pos, neg), std::max(pos, neg), amount);
  if (count == 0) return out;

  const Matrix minority = train.X.select_rows(out.minority_rows);
  const Standardizer z = Standardizer::fit(train.X);
  Rng rng(seed);
  out.synthetic = smote(minority, k, count, rng, z.scale);
  for (std::size_t j = 0; j < out.synthetic.rows.rows(); ++j) {
    out.data.ids.push_back("smote:" + std::to_string(j));
    out.data.y.push_back(out.minority_label);
    out.data.X.append_row(out.synthetic.rows.row(j));
  }
  return out;
}

}  // namespace bizsurv::learn
