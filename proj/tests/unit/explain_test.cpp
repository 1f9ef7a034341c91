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

#include <gtest/gtest.h>

#include <cmath>

#include "bizsurv/common/error.hpp"
#include "bizsurv/common/rng.hpp"
#include "bizsurv/explain/explain.hpp"
#include "bizsurv/learn/model.hpp"
#include "bizsurv/text/text.hpp"

namespace bizsurv::explain {
namespace {

Matrix gaussian_background(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (auto& v : m.data()) v = rng.normal();
  return m;
}

ProbabilityFn linear(std::vector<double> w) {
  return [w](const Matrix& X) {
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
      double s = 0.5;
      for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * X(i, j);
      out[i] = s;
    }
    return out;
  };
}

TEST(Quartiles, NumpyLinearInterpolation) {
  // numpy.percentile([1,2,3,4,5,6,7,8], [25,50,75]) = [2.75, 4.5, 6.25]
  EXPECT_EQ(quartile_edges({8, 1, 2, 3, 4, 5, 6, 7}), (std::vector<double>{2.75, 4.5, 6.25}));
  EXPECT_EQ(quartile_edges({1, 1, 1, 1, 9}), (std::vector<double>{1}));
  std::vector<double> e = {2.75, 4.5, 6.25};
  EXPECT_EQ(bin_of(e, 1.0), 0u);
  EXPECT_EQ(bin_of(e, 2.75), 0u);
  EXPECT_EQ(bin_of(e, 3.0), 1u);
  EXPECT_EQ(bin_of(e, 7.0), 3u);
}

TEST(Ridge, MatchesClosedFormAndRecoversExactLines) {
  Matrix Z(4, 1);
  std::vector<double> y = {1, 3, 5, 7}, w = {1, 1, 1, 1};
  for (std::size_t i = 0; i < 4; ++i) Z(i, 0) = double(i);
  auto exact = weighted_ridge(Z, y, w, 0.0);
  EXPECT_NEAR(exact.coefficients[0], 2.0, 1e-12);
  EXPECT_NEAR(exact.intercept, 1.0, 1e-12);
  EXPECT_NEAR(exact.r2, 1.0, 1e-12);
  // Centered closed form: beta = Sxy / (Sxx + alpha) = 10 / (5 + 1).
  auto shrunk = weighted_ridge(Z, y, w, 1.0);
  EXPECT_NEAR(shrunk.coefficients[0], 10.0 / 6.0, 1e-12);
  EXPECT_NEAR(shrunk.intercept, 4.0 - 1.5 * 10.0 / 6.0, 1e-12);
  std::vector<double> flat = {2, 2, 2, 2};
  EXPECT_EQ(weighted_ridge(Z, flat, w, 1.0).r2, 1.0);
}

TEST(Tabular, DeterministicBoundedAndStable) {
  const std::vector<std::string> cols = {"a", "b", "c", "d"};
  auto bg = gaussian_background(300, 4, 1);
  std::vector<double> x = {0.3, -1.2, 2.0, 0.1};
  TabularConfig cfg;
  cfg.seed = 9;
  cfg.top_k = 3;
  auto fn = linear({0.05, -0.1, 0.0, 0.02});
  auto e1 = explain_tabular(fn, x, "i", cols, bg, cfg);
  auto e2 = explain_tabular(fn, x, "i", cols, bg, cfg);
  EXPECT_EQ(e1.to_json(), e2.to_json());
  EXPECT_EQ(e1.entries.size(), 3u);
  EXPECT_GE(e1.local_fit_r2, 0.0);
  EXPECT_LE(e1.local_fit_r2, 1.0);
  EXPECT_EQ(e1.predicted_class, fn(Matrix(1, 4))[0] >= 0.5 ? 1 : 0);
  EXPECT_DOUBLE_EQ(e1.kernel_width, 0.75 * 2.0);
  for (std::size_t i = 1; i < e1.entries.size(); ++i)
    EXPECT_GE(std::abs(e1.entries[i - 1].weight), std::abs(e1.entries[i].weight));
  cfg.seed = 10;
  EXPECT_NE(explain_tabular(fn, x, "i", cols, bg, cfg).to_json(), e1.to_json());
}

TEST(Tabular, ConditionsAndExclusions) {
  Matrix bg(8, 3);
  for (std::size_t i = 0; i < 8; ++i) {
    bg(i, 0) = double(i + 1);
    bg(i, 1) = double(i % 2);
    bg(i, 2) = 5.0;
  }
  std::vector<double> x = {7.5, 1.0, 5.0};
  auto e = explain_tabular(linear({0.1, 0.2, 0.3}), x, "i", {"reviews", "flag", "const"}, bg);
  EXPECT_EQ(e.excluded_features, std::vector<std::string>{"const"});
  for (const auto& entry : e.entries) {
    if (entry.feature == "reviews") {
      EXPECT_EQ(entry.condition, "reviews > 6.25");
    }
    if (entry.feature == "flag") {
      EXPECT_EQ(entry.condition, "flag = 1");
    }
  }
}

TEST(Tabular, LinearFaithfulnessInContinuousMode) {
  const std::vector<std::string> cols = {"a", "b", "c", "d", "e"};
  auto bg = gaussian_background(500, 5, 2);
  TabularConfig cfg;
  cfg.mode = TabularMode::Continuous;
  cfg.top_k = 5;
  auto e = explain_tabular(linear({0.0, 0.08, -0.04, 0.0, 0.01}), std::vector<double>(5, 0.0), "i", cols, bg, cfg);
  EXPECT_GE(e.local_fit_r2, 0.9);
  EXPECT_EQ(e.entries[0].feature, "b");
  EXPECT_GT(e.entries[0].weight, 0);
  EXPECT_EQ(e.entries[1].feature, "c");
  EXPECT_LT(e.entries[1].weight, 0);
}

TEST(Tabular, ConstantModelHasNoSalientFeatures) {
  auto bg = gaussian_background(50, 2, 3);
  auto e = explain_tabular(linear({0.0, 0.0}), std::vector<double>{0, 0}, "i", {"a", "b"}, bg);
  EXPECT_NE(render_explanation(e, "json").find("no salient features"), std::string::npos);
  EXPECT_NE(render_explanation(e, "html").find("no salient features"), std::string::npos);
}

TEST(Tabular, RejectsBadShapes) {
  auto bg = gaussian_background(10, 2, 4);
  EXPECT_THROW(explain_tabular(linear({0, 0}), std::vector<double>{1}, "i", {"a", "b"}, bg), DataError);
  EXPECT_THROW(explain_tabular(linear({0, 0}), std::vector<double>{1, 2}, "i", {"a", "b"}, Matrix()), DataError);
}

ProbabilityFn word_model(std::size_t planted_column) {
  return [=](const Matrix& X) {
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
      out[i] = X(i, planted_column) > 0 ? 0.9 : 0.2;
    }
    return out;
  };
}

TEST(Text, PlantedTokenRanksFirst) {
  std::vector<std::string> cols = {text::bow_column("soup"), text::bow_column("cold"), text::bow_column("spoon")};
  auto e = explain_text(word_model(1), cols, "The soup was COLD, with a spoon.", "r1");
  ASSERT_FALSE(e.word_weights.empty());
  EXPECT_EQ(e.word_weights[0].first, "cold");
  EXPECT_GT(e.word_weights[0].second, 0);
  EXPECT_EQ(e.predicted_class, 1);
  const auto html = render_explanation(e, "html");
  EXPECT_NE(html.find("data-token=\"cold\""), std::string::npos);
  EXPECT_NE(html.find("#ff7f0e"), std::string::npos);
}

TEST(Text, UnexplainableInput) {
  std::vector<std::string> cols = {text::bow_column("soup")};
  EXPECT_THROW(explain_text(word_model(0), cols, "nothing relevant here", "r"), DataError);
}

TEST(Render, UnknownFormatListsSupported) {
  auto bg = gaussian_background(20, 1, 5);
  auto e = explain_tabular(linear({0.1}), std::vector<double>{0.0}, "i", {"a"}, bg);
  try {
    render_explanation(e, "pdf");
    FAIL() << "expected an error";
  } catch (const Error& err) {
    EXPECT_NE(std::string(err.what()).find("json, html"), std::string::npos);
  }
  auto j = nlohmann::json::parse(render_explanation(e, "json"));
  EXPECT_TRUE(j.contains("entries"));
  EXPECT_TRUE(j.contains("local_fit_r2"));
  const auto html = render_explanation(e, "html");
  EXPECT_NE(html.find("<svg"), std::string::npos);
}

TEST(Model, ExplainsTrainedClassifier) {
  Rng rng(6);
  learn::Dataset d;
  d.columns = {"signal", "noise"};
  for (int i = 0; i < 300; ++i) {
    const int y = rng.bernoulli(0.5) ? 1 : 0;
    d.X.append_row(std::vector<double>{y * 2.0 + rng.normal(), rng.normal()});
    d.y.push_back(y);
    d.ids.push_back(std::to_string(i));
  }
  auto m = learn::train_classifier(learn::ModelKind::GBDT, d, {}, 1);
  TabularConfig cfg;
  cfg.top_k = 1;
  auto e = explain_tabular(m, d.X.row(0), "0", d.X, cfg);
  ASSERT_EQ(e.entries.size(), 1u);
  EXPECT_EQ(e.entries[0].feature, "signal");
  EXPECT_DOUBLE_EQ(e.probability, m.predict_one(d.X.row(0)));
}

}  // namespace
}  // namespace bizsurv::explain
