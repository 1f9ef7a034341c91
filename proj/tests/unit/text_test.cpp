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
#include "bizsurv/common/rng.hpp"
#include "bizsurv/text/text.hpp"
#include "../support/fixtures.hpp"

namespace bizsurv::text {
namespace {

using Tokens = std::vector<std::string>;

TEST(Preprocess, LowercasesStripsPunctuationAndStopWords) {
  EXPECT_EQ(preprocess("The FOOD was great!!! (really)"), (Tokens{"food", "great", "really"}));
  EXPECT_EQ(preprocess("  \t\n "), Tokens{});
  EXPECT_EQ(preprocess("don't-stop"), (Tokens{"don't-stop"}));
}

TEST(Preprocess, HandlesUnicode) {
  EXPECT_EQ(preprocess("CAFÉ «Ñandú» ΚΑΛΟ"), (Tokens{"café", "ñandú", "καλο"}));
  // Invalid UTF-8 bytes are dropped rather than failing.
  EXPECT_EQ(preprocess(std::string("ta\xff" "co")), (Tokens{"taco"}));
  // Ideographic space separates tokens.
  EXPECT_EQ(preprocess("ramen　pho"), (Tokens{"ramen", "pho"}));
}

TEST(Preprocess, CustomStopList) {
  auto stop = StopList::parse("# comment\nramen\n");
  EXPECT_EQ(preprocess("the ramen", stop), (Tokens{"the"}));
  EXPECT_NE(stop.digest(), StopList::english().digest());
}

TEST(Polarity, Maps) {
  EXPECT_EQ(polarity(2), Polarity::Negative);
  EXPECT_EQ(polarity(3), Polarity::Positive);
  EXPECT_EQ(polarity(3, PolarityMap::DropThree), Polarity::Neutral);
  EXPECT_EQ(polarity(4, PolarityMap::DropThree), Polarity::Positive);
  EXPECT_EQ(parse_polarity_map("drop_three"), PolarityMap::DropThree);
  EXPECT_FALSE(parse_polarity_map("sideways"));
}

TEST(Vocabulary, FrequencyThenLexicographic) {
  auto v = build_vocabulary({{"b", "a", "c"}, {"b", "c", "d"}}, 3);
  EXPECT_EQ(v.terms(), (Tokens{"b", "c", "a"}));
  EXPECT_FALSE(v.index("d"));
  EXPECT_THROW(build_vocabulary({}), DataError);
  EXPECT_THROW(build_vocabulary({{}}), DataError);
}

TEST(Bow, CountsAcrossDocuments) {
  Vocabulary v({"pizza", "good"});
  EXPECT_EQ(bow_vector({{"pizza", "good", "pizza"}, {"meh", "good"}}, v), (std::vector<int>{2, 2}));
  EXPECT_EQ(bow_vector(Tokens{"nothing"}, v), (std::vector<int>{0, 0}));
}

TEST(Bow, ColumnEscaping) {
  EXPECT_EQ(bow_column("pizza"), "bow.pizza");
  EXPECT_EQ(bow_column("a,b"), "bow.a%2Cb");
  EXPECT_EQ(bow_column("100%"), "bow.100%25");
}

TEST(Extremes, BestAndWorstWithSeparator) {
  using testing::at;
  std::vector<corpus::ReviewRecord> reviews = {
      testing::review("r1", "a", "u", 5, at(2017, 1, 1), "Lovely pasta"),
      testing::review("r2", "a", "u", 1, at(2017, 1, 2), "Cold soup"),
      testing::review("r3", "a", "u", 3, at(2017, 1, 3), "Fine")};
  Rng rng(1);
  auto e = select_extreme_reviews(reviews, rng);
  ASSERT_TRUE(e);
  EXPECT_EQ(e->best.review_id, "r1");
  EXPECT_EQ(e->worst.review_id, "r2");
  EXPECT_EQ(e->concatenated, (Tokens{"cold", "soup", std::string(kSeparator), "lovely", "pasta"}));
  Rng rng2(1);
  EXPECT_FALSE(select_extreme_reviews({}, rng2));
}

TEST(TextFeatures, RoundTripsArtifacts) {
  using testing::at;
  corpus::Snapshot s(testing::ymd(2017, 12, 31),
                     {testing::business("a", 0, 0, {"Restaurants"}), testing::business("b", 0, 0, {"Restaurants"})},
                     {testing::review("r1", "a", "u", 5, at(2017, 1, 1), "great pizza"),
                      testing::review("r2", "a", "u", 2, at(2017, 1, 2), "cold pizza")},
                     {}, {});
  auto r = compute_text_features(s, {"a", "b"});
  EXPECT_EQ(r.without_reviews, Tokens{"b"});
  EXPECT_EQ(r.vocabulary.term(0), "pizza");
  ASSERT_EQ(r.bow.ids, Tokens{"a"});
  EXPECT_EQ(r.bow.values(0, 0), 2);
  auto back = read_review_polarity_jsonl(review_polarity_jsonl(r.reviews));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].polarity, Polarity::Negative);
  EXPECT_EQ(back[0].tokens, r.reviews[0].tokens);
  EXPECT_EQ(read_vocabulary_json(vocabulary_json(r.vocabulary)).terms(), r.vocabulary.terms());
}

}  // namespace
}  // namespace bizsurv::text
