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

#include "bizsurv/learn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "bizsurv/common/error.hpp"
#include "bizsurv/common/hash.hpp"
#include "bizsurv/common/rng.hpp"

namespace bizsurv::learn {

std::size_t Dataset::count(int label) const {
  return static_cast<std::size_t>(std::count(y.begin(), y.end(), label));
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.columns = columns;
  out.X = X.select_rows(rows);
  out.ids.reserve(rows.size());
  out.y.reserve(rows.size());
  for (std::size_t r : rows) {
    out.ids.push_back(ids[r]);
    out.y.push_back(y[r]);
  }
  return out;
}

void Dataset::validate() const {
  if (X.cols() != columns.size() && !(X.rows() == 0)) {
    throw DataError("dataset has " + std::to_string(X.cols()) + " columns but a schema of " +
                    std::to_string(columns.size()));
  }
  if (X.rows() != ids.size() || y.size() != ids.size()) throw DataError("dataset row counts disagree");
  for (int label : y) {
    if (label != 0 && label != 1) throw DataError("labels must be 0 or 1");
  }
  for (std::size_t r = 0; r < X.rows(); ++r) {
    for (std::size_t c = 0; c < X.cols(); ++c) {
      if (!std::isfinite(X(r, c))) {
        throw DataError("non-finite value in row " + ids[r] + ", column " + columns[c]);
      }
    }
  }
}

std::uint64_t schema_fingerprint(const std::vector<std::string>& columns) {
  std::uint64_t h = fnv1a64("bizsurv-schema");
  for (const auto& c : columns) {
    h = fnv1a64(c, h);
    h = fnv1a64(std::string_view("\x1f", 1), h);
  }
  return h;
}

std::vector<bool> stratified_test_mask(std::span<const int> labels, double test_fraction,
                                       std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw DataError("test fraction must lie strictly between 0 and 1");
  }
  std::vector<bool> test(labels.size(), false);
  Rng rng(seed);
  for (int label : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == label) members.push_back(i);
    }
    if (members.size() < 2) {
      throw DataError("class " + std::to_string(label) + " has " + std::to_string(members.size()) +
                      " member(s); a stratified split needs at least 2");
    }
    // Fisher-Yates with our own draws so the permutation is portable.
    for (std::size_t i = members.size() - 1; i > 0; --i) {
      std::swap(members[i], members[rng.index(i + 1)]);
    }
    auto n_test = static_cast<std::size_t>(std::llround(members.size() * test_fraction));
    n_test = std::clamp<std::size_t>(n_test, 1, members.size() - 1);
    for (std::size_t i = 0; i < n_test; ++i) test[members[i]] = true;
  }
  return test;
}

Split stratified_split(const Dataset& data, double test_fraction, std::uint64_t seed) {
  auto mask = stratified_test_mask(data.y, test_fraction, seed);
  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t i = 0; i < mask.size(); ++i) (mask[i] ? test_rows : train_rows).push_back(i);
  return {data.subset(train_rows), data.subset(test_rows)};
}

Dataset assemble_dataset(const std::vector<const FeatureTable*>& tables,
                         const std::map<std::string, int>& labels, AssembleReport* report) {
  if (tables.empty()) throw DataError("no feature tables selected");
  AssembleReport rep;
  std::vector<std::unordered_map<std::string_view, std::size_t>> index(tables.size());
  Dataset out;
  std::set<std::string> seen_columns;
  for (std::size_t t = 0; t < tables.size(); ++t) {
    for (std::size_t r = 0; r < tables[t]->ids.size(); ++r) index[t].emplace(tables[t]->ids[r], r);
    for (const auto& c : tables[t]->columns) {
      if (!seen_columns.insert(c).second) throw DataError("duplicate feature column " + c);
      out.columns.push_back(c);
    }
  }
  // Candidate ids: the first table's, sorted.
  std::set<std::string> candidates(tables[0]->ids.begin(), tables[0]->ids.end());
  for (std::size_t t = 1; t < tables.size(); ++t) {
    for (const auto& id : tables[t]->ids) candidates.insert(id);
  }
  out.X = Matrix(0, out.columns.size());
  std::vector<double> row(out.columns.size());
  for (const auto& id : candidates) {
    auto lab = labels.find(id);
    if (lab == labels.end()) {
      ++rep.unlabeled;
      continue;
    }
    bool complete = true;
    for (std::size_t t = 0; t < tables.size(); ++t) {
      if (!index[t].count(id)) {
        ++rep.dropped[tables[t]->family];
        complete = false;
      }
    }
    if (!complete) continue;
    std::size_t c = 0;
    for (std::size_t t = 0; t < tables.size(); ++t) {
      for (double v : tables[t]->values.row(index[t].at(id))) row[c++] = v;
    }
    out.ids.push_back(id);
    out.y.push_back(lab->second);
    out.X.append_row(row);
  }
  if (out.ids.empty()) throw DataError("feature tables and labels share no business ids");
  out.validate();
  if (report) *report = rep;
  return out;
}

Standardizer Standardizer::fit(const Matrix& X) {
  Standardizer s;
  const std::size_t n = X.rows(), d = X.cols();
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 1.0);
  if (n == 0) return s;
  for (std::size_t r = 0; r < n; ++r) {
    auto row = X.row(r);
    for (std::size_t c = 0; c < d; ++c) s.mean[c] += row[c];
  }
  for (auto& m : s.mean) m /= static_cast<double>(n);
  std::vector<double> var(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    auto row = X.row(r);
    for (std::size_t c = 0; c < d; ++c) {
      double dv = row[c] - s.mean[c];
      var[c] += dv * dv;
    }
  }
  for (std::size_t c = 0; c < d; ++c) {
    double sd = std::sqrt(var[c] / static_cast<double>(n));
    s.scale[c] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

void Standardizer::apply_row(std::span<const double> in, std::span<double> out) const {
  for (std::size_t c = 0; c < in.size(); ++c) out[c] = (in[c] - mean[c]) / scale[c];
}

Matrix Standardizer::apply(const Matrix& X) const {
  Matrix out(X.rows(), X.cols());
  for (std::size_t r = 0; r < X.rows(); ++r) apply_row(X.row(r), out.row(r));
  return out;
}

}  // namespace bizsurv::learn
