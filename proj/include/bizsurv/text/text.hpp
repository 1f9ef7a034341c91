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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bizsurv/common/feature_table.hpp"
#include "bizsurv/common/rng.hpp"
#include "bizsurv/corpus/snapshot.hpp"

namespace bizsurv::text {

// Reserved separator between the worst and best review token streams.
// preprocess() can never produce it.
inline constexpr std::string_view kSeparator = "<SEP>";

class StopList {
 public:
  static StopList parse(std::string_view text);
  // Shipped English list (data/stopwords_en.txt).
  static const StopList& english();

  bool contains(std::string_view token) const { return words_.count(std::string(token)) > 0; }
  std::size_t size() const { return words_.size(); }
  // FNV-1a of the manifest text the list was parsed from.
  std::uint64_t digest() const { return digest_; }

 private:
  std::unordered_set<std::string> words_;
  std::uint64_t digest_ = 0;
};

// Lowercases, splits on Unicode whitespace, strips punctuation at token
// boundaries and drops stop words. Invalid UTF-8 bytes are skipped.
std::vector<std::string> preprocess(std::string_view text,
                                    const StopList& stop_list = StopList::english());

enum class Polarity { Negative, Neutral, Positive };

enum class PolarityMap {
  ThreeUp,    // {1,2} negative, {3,4,5} positive
  DropThree,  // {1,2} negative, {4,5} positive, 3 neutral
};

Polarity polarity(int stars, PolarityMap map = PolarityMap::ThreeUp);
std::string_view polarity_name(Polarity p);
std::optional<PolarityMap> parse_polarity_map(std::string_view name);

class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> terms);

  std::size_t size() const { return terms_.size(); }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::string& term(std::size_t i) const { return terms_[i]; }
  std::optional<std::size_t> index(std::string_view term) const;

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Most frequent tokens over all documents, ties broken lexicographically.
// Throws DataError when the corpus has no tokens.
Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& documents,
                            std::size_t max_size = 1000);

// In-vocabulary token counts summed over the documents.
std::vector<int> bow_vector(const std::vector<std::vector<std::string>>& documents,
                            const Vocabulary& vocabulary);
std::vector<int> bow_vector(const std::vector<std::string>& tokens, const Vocabulary& vocabulary);

struct ExtremeReviews {
  corpus::ReviewRecord best;
  corpus::ReviewRecord worst;
  std::vector<std::string> concatenated;  // worst ++ <SEP> ++ best
};

// Highest and lowest rated reviews; ties are broken uniformly with `rng`.
// Returns nullopt for an empty list.
std::optional<ExtremeReviews> select_extreme_reviews(const std::vector<corpus::ReviewRecord>& reviews,
                                                     Rng& rng,
                                                     const StopList& stop_list = StopList::english());

struct TokenizedReview {
  std::string review_id;
  std::string business_id;
  int stars = 0;
  Polarity polarity = Polarity::Neutral;
  std::vector<std::string> tokens;
};

struct TextConfig {
  std::size_t vocabulary_size = 1000;
  PolarityMap polarity_map = PolarityMap::ThreeUp;
  std::uint64_t seed = 0;
};

struct TextResult {
  Vocabulary vocabulary;
  std::vector<TokenizedReview> reviews;  // observation-period reviews, by review id
  std::map<std::string, ExtremeReviews> extremes;
  std::vector<std::string> without_reviews;
  FeatureTable bow;
};

// Column name for a vocabulary term; commas and '%' are percent-escaped.
std::string bow_column(std::string_view term);

TextResult compute_text_features(const corpus::Snapshot& snapshot,
                                 const std::vector<std::string>& restaurant_ids,
                                 const TextConfig& config = {});

std::string review_polarity_jsonl(const std::vector<TokenizedReview>& reviews);
std::vector<TokenizedReview> read_review_polarity_jsonl(std::string_view content);
std::string extreme_reviews_jsonl(const std::map<std::string, ExtremeReviews>& extremes);
std::string vocabulary_json(const Vocabulary& vocabulary);
Vocabulary read_vocabulary_json(std::string_view content);

}  // namespace bizsurv::text
