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

#include "bizsurv/learn/ablation.hpp"

#include <algorithm>
#include <set>

#include "bizsurv/common/error.hpp"
#include "bizsurv/common/io.hpp"
#include "bizsurv/common/rng.hpp"
#include "bizsurv/learn/metrics.hpp"
#include "bizsurv/learn/smote.hpp"

namespace bizsurv::learn {

const std::vector<std::pair<std::string, std::vector<std::string>>>& ablation_rows() {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> rows = {
      {"G", {"G"}},
      {"U", {"U"}},
      {"A", {"A"}},
      {"L", {"L"}},
      {"GU", {"G", "U"}},
      {"ALL", {"G", "U", "A", "L"}},
      {"-GU", {"A", "L"}},
      {"-G", {"U", "A", "L"}},
      {"-U", {"G", "A", "L"}},
      {"-A", {"G", "U", "L"}},
      {"-L", {"G", "U", "A"}},
  };
  return rows;
}

std::string AblationResult::to_csv() const {
  std::string out = "feature_set,GBDT,MLP\n";
  auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("NA"); };
  for (const auto& r : rows) out += r.name + "," + cell(r.gbdt_auc) + "," + cell(r.mlp_auc) + "\n";
  return out;
}

const AblationRow* AblationResult::find(const std::string& name) const {
  for (const auto& r : rows) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

namespace {

Dataset family_dataset(const FeatureTable& table, const std::vector<std::string>& ids,
                       const std::map<std::string, int>& labels) {
  std::map<std::string_view, std::size_t> index;
  for (std::size_t r = 0; r < table.ids.size(); ++r) index.emplace(table.ids[r], r);
  Dataset d;
  d.columns = table.columns;
  d.X = Matrix(0, table.columns.size());
  for (const auto& id : ids) {
    d.ids.push_back(id);
    d.y.push_back(labels.at(id));
    d.X.append_row(table.values.row(index.at(id)));
  }
  return d;
}

}  // namespace

AblationResult run_ablation(const std::map<std::string, const FeatureTable*>& tables,
                            const std::map<std::string, int>& labels, const AblationConfig& config,
                            std::uint64_t seed) {
  AblationResult result;
  std::vector<std::string> present;
  for (const char* f : {"G", "U", "A", "L"}) {
    auto it = tables.find(f);
    if (it != tables.end() && it->second) {
      present.emplace_back(f);
    } else {
      result.warnings.push_back(std::string("feature family ") + f + " is missing");
    }
  }
  if (present.empty()) throw DataError("no feature tables available for the ablation");

  // Shared population: labeled ids present in every available table.
  std::set<std::string> common;
  for (const auto& [id, _] : labels) common.insert(id);
  for (const auto& f : present) {
    const auto& ids = tables.at(f)->ids;
    std::set<std::string> keep(ids.begin(), ids.end());
    std::set<std::string> next;
    std::set_intersection(common.begin(), common.end(), keep.begin(), keep.end(),
                          std::inserter(next, next.end()));
    common.swap(next);
  }
  if (common.empty()) throw DataError("feature tables and labels share no business ids");
  std::vector<std::string> ids(common.begin(), common.end());
  std::vector<int> y;
  for (const auto& id : ids) y.push_back(labels.at(id));

  const auto mask = stratified_test_mask(y, config.test_fraction, derive_seed(seed, "split"));
  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t i = 0; i < mask.size(); ++i) (mask[i] ? test_rows : train_rows).push_back(i);
  result.train_rows = train_rows.size();
  result.test_rows = test_rows.size();
  std::vector<int> y_test;
  for (std::size_t i : test_rows) y_test.push_back(y[i]);

  std::map<std::string, std::vector<double>> gbdt_probs, mlp_probs;
  for (const auto& f : present) {
    Dataset all = family_dataset(*tables.at(f), ids, labels);
    Dataset train = all.subset(train_rows);
    Dataset test = all.subset(test_rows);
    if (config.smote) {
      auto over = oversample(train, config.smote_amount, config.smote_k, derive_seed(seed, "smote:" + f));
      for (const auto& w : over.synthetic.warnings) result.warnings.push_back(f + ": " + w);
      train = std::move(over.data);
    }
    auto gbdt = train_classifier(ModelKind::GBDT, train, config.hyper, derive_seed(seed, "gbdt:" + f));
    auto mlp = train_classifier(ModelKind::MLP, train, config.hyper, derive_seed(seed, "mlp:" + f));
    gbdt_probs[f] = gbdt.predict_proba(test);
    mlp_probs[f] = mlp.predict_proba(test);
  }

  auto score = [&](const std::map<std::string, std::vector<double>>& probs,
                   const std::vector<std::string>& fams) -> double {
    if (fams.size() == 1) return roc_auc(probs.at(fams[0]), y_test).auc;
    std::vector<std::vector<double>> members;
    for (const auto& f : fams) members.push_back(probs.at(f));
    return roc_auc(majority_vote(members).scores, y_test).auc;
  };

  for (const auto& [name, fams] : ablation_rows()) {
    AblationRow row{name, {}, std::nullopt, std::nullopt};
    for (const auto& f : fams) {
      if (gbdt_probs.count(f)) row.families.push_back(f);
    }
    if (row.families.size() != fams.size()) {
      result.warnings.push_back("row " + name + " not scored: a feature family is unavailable");
    } else {
      row.gbdt_auc = score(gbdt_probs, row.families);
      row.mlp_auc = score(mlp_probs, row.families);
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace bizsurv::learn
