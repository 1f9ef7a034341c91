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

#include "bizsurv/common/error.hpp"
#include "bizsurv/common/io.hpp"
#include "bizsurv/corpus/labels.hpp"
#include "bizsurv/corpus/snapshot.hpp"
#include "bizsurv/corpus/synth.hpp"
#include "../support/fixtures.hpp"

namespace bizsurv::corpus {
namespace {

using testing::at;
using testing::ymd;

TEST(Snapshot, ParsesAndCountsProblems) {
  testing::TempDir dir("snap");
  write_file_atomic(dir.path() / "business.json",
                    R"({"business_id":"b1","name":"A","latitude":33.4,"longitude":-112.0,"categories":"Restaurants, Pizza","is_open":1})"
                    "\n"
                    R"({"business_id":"b2","latitude":95,"longitude":0})"
                    "\n"
                    "not json\n"
                    R"({"business_id":"b1","latitude":33.4,"longitude":-112.0})"
                    "\n");
  write_file_atomic(dir.path() / "review.json",
                    R"({"review_id":"r1","business_id":"b1","user_id":"u","stars":4,"date":"2017-05-01 10:00:00","text":"ok"})"
                    "\n"
                    R"({"review_id":"r2","business_id":"b1","user_id":"u","stars":4,"date":"2018-05-01 10:00:00"})"
                    "\n"
                    R"({"review_id":"r3","business_id":"zz","user_id":"u","stars":9,"date":"2017-05-01 10:00:00"})"
                    "\n");
  auto parsed = parse_snapshot(dir.path(), ymd(2017, 12, 31));
  const auto& rep = parsed.report;
  EXPECT_EQ(parsed.snapshot.businesses().size(), 1u);
  EXPECT_EQ(rep.business.invalid, 1u);
  EXPECT_EQ(rep.business.malformed, 1u);
  EXPECT_EQ(rep.business.duplicate, 1u);
  EXPECT_EQ(parsed.snapshot.reviews().size(), 1u);
  EXPECT_EQ(rep.review.after_as_of, 1u);
  EXPECT_EQ(rep.review.invalid, 1u);
  const auto* b = parsed.snapshot.find("b1");
  ASSERT_TRUE(b);
  EXPECT_TRUE(is_restaurant(*b));
  EXPECT_EQ(b->categories, (std::vector<std::string>{"Restaurants", "Pizza"}));
}

TEST(Snapshot, MissingBusinessFileThrows) {
  testing::TempDir dir("snap-empty");
  EXPECT_THROW(parse_snapshot(dir.path(), ymd(2017, 12, 31)), DataError);
}

TEST(Snapshot, WriteParseRoundTrip) {
  Snapshot s(ymd(2017, 12, 31), {testing::business("b1", 33.4, -112.0, {"Restaurants", "Thai"})},
             {testing::review("r1", "b1", "u1", 5, at(2017, 3, 1, 9), "Great \"pad\" thai")},
             {{"b1", {at(2017, 1, 1, 8), at(2017, 1, 2, 20)}}}, {{"p1", "b1"}});
  testing::TempDir dir("roundtrip");
  write_snapshot(s, dir.path());
  auto back = parse_snapshot(dir.path(), ymd(2017, 12, 31)).snapshot;
  ASSERT_EQ(back.reviews().size(), 1u);
  EXPECT_EQ(back.reviews()[0].text, "Great \"pad\" thai");
  EXPECT_EQ(back.reviews()[0].timestamp, at(2017, 3, 1, 9));
  ASSERT_EQ(back.checkins().size(), 1u);
  EXPECT_EQ(back.checkins()[0].timestamps.size(), 2u);
  EXPECT_EQ(back.photos().size(), 1u);
  EXPECT_EQ(back.businesses()[0].categories, s.businesses()[0].categories);
}

TEST(Snapshot, RestaurantMatchIsExact) {
  EXPECT_TRUE(is_restaurant(testing::business("a", 0, 0, {"restaurants"})));
  EXPECT_FALSE(is_restaurant(testing::business("a", 0, 0, {"Restaurant Supplies"})));
  EXPECT_EQ(split_categories(" Food ,  Bars,"), (std::vector<std::string>{"Food", "Bars"}));
}

TEST(Labels, TruthTable) {
  auto r = [](std::string id, bool open) { return testing::business(std::move(id), 0, 0, {"Restaurants"}, open); };
  Snapshot obs(ymd(2017, 12, 31), {r("a", true), r("b", true), r("c", true), r("d", false)}, {}, {}, {});
  Snapshot pred(ymd(2019, 12, 31), {r("a", true), r("b", false), r("d", true)}, {}, {}, {});
  auto l = derive_labels(obs, pred);
  ASSERT_EQ(l.labels.size(), 3u);
  EXPECT_EQ(l.labels[0].label, Survival::Survived);
  EXPECT_EQ(l.labels[1].label, Survival::Dead);
  EXPECT_EQ(l.labels[2].label, Survival::Dead);
  EXPECT_EQ(l.report.excluded_closed, 1u);
  EXPECT_EQ(l.report.dead_closed, 1u);
  EXPECT_EQ(l.report.dead_delisted, 1u);
  EXPECT_EQ(l.report.considered, l.report.survived + l.report.dead);
}

TEST(Labels, RejectsMisorderedOrDisjointSnapshots) {
  auto r = testing::business("a", 0, 0, {"Restaurants"});
  auto s = testing::business("z", 0, 0, {"Restaurants"});
  Snapshot early(ymd(2017, 12, 31), {r}, {}, {}, {});
  Snapshot late(ymd(2019, 12, 31), {r}, {}, {}, {});
  Snapshot other(ymd(2019, 12, 31), {s}, {}, {}, {});
  EXPECT_THROW(derive_labels(late, early), DataError);
  EXPECT_THROW(derive_labels(early, other), DataError);
}

TEST(Labels, JsonlRoundTrip) {
  testing::TempDir dir("labels");
  std::vector<LabeledRestaurant> labels = {{"a", Survival::Survived, ymd(2017, 12, 31), ymd(2019, 12, 31)},
                                           {"b", Survival::Dead, ymd(2017, 12, 31), ymd(2019, 12, 31)}};
  write_labels_jsonl(labels, dir.path() / "l.jsonl");
  EXPECT_EQ(read_labels_jsonl(dir.path() / "l.jsonl"), labels);
}

TEST(Synth, DeterministicForSeed) {
  SynthConfig c;
  c.restaurants = 120;
  c.other_businesses = 40;
  c.users = 80;
  testing::TempDir a("synth-a"), b("synth-b");
  write_snapshot(generate_synthetic_corpus(c, 9).observation, a.path());
  write_snapshot(generate_synthetic_corpus(c, 9).observation, b.path());
  EXPECT_EQ(read_file(a.path() / "review.json"), read_file(b.path() / "review.json"));
  EXPECT_EQ(read_file(a.path() / "business.json"), read_file(b.path() / "business.json"));
  write_snapshot(generate_synthetic_corpus(c, 10).observation, b.path());
  EXPECT_NE(read_file(a.path() / "review.json"), read_file(b.path() / "review.json"));
}

TEST(Synth, LabelsFollowTruth) {
  SynthConfig c;
  c.restaurants = 300;
  c.other_businesses = 50;
  c.users = 100;
  auto corpus = generate_synthetic_corpus(c, 3);
  auto labels = derive_labels(corpus.observation, corpus.prediction);
  std::map<std::string, bool> truth;
  for (const auto& t : corpus.truth)
    if (t.open_at_observation) truth[t.business_id] = t.survived;
  ASSERT_EQ(labels.labels.size(), truth.size());
  for (const auto& l : labels.labels) EXPECT_EQ(l.label == Survival::Survived, truth.at(l.business_id));
  const double auc = planted_oracle_auc(corpus.truth);
  EXPECT_GT(auc, 0.5);
  EXPECT_LE(auc, 1.0);
}

TEST(Synth, RejectsUnknownCoefficient) {
  SynthConfig c;
  c.signal.coefficients["moon_phase"] = 1.0;
  EXPECT_THROW(generate_synthetic_corpus(c, 1), DataError);
}

}  // namespace
}  // namespace bizsurv::corpus
