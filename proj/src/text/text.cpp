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

#include "bizsurv/text/text.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "bizsurv/common/error.hpp"
#include "bizsurv/common/hash.hpp"
#include "bizsurv/common/manifests.hpp"

namespace bizsurv::text {
using nlohmann::json;

namespace {

// Decodes UTF-8, skipping malformed sequences.
std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    int len = 0;
    char32_t cp = 0;
    if (c < 0x80) {
      len = 1;
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      ++i;
      continue;
    }
    if (i + len > s.size()) break;
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (!ok || cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool is_space(char32_t c) {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

bool is_punct(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
           (c >= 0x7B && c <= 0x7E);
  }
  switch (c) {
    case 0xA1: case 0xA2: case 0xA3: case 0xA4: case 0xA5: case 0xA6: case 0xA7: case 0xA8:
    case 0xA9: case 0xAB: case 0xAC: case 0xAD: case 0xAE: case 0xAF: case 0xB0: case 0xB1:
    case 0xB4: case 0xB6: case 0xB7: case 0xB8: case 0xBB: case 0xBF: case 0xD7: case 0xF7:
    case 0xFFFD:
      return true;
    default:
      break;
  }
  return (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) ||
         (c >= 0x20A0 && c <= 0x20CF) || (c >= 0x3001 && c <= 0x3003) ||
         (c >= 0x3008 && c <= 0x3011) || (c >= 0x3014 && c <= 0x301F) ||
         (c >= 0xFF01 && c <= 0xFF0F) || (c >= 0xFF1A && c <= 0xFF20) ||
         (c >= 0xFF3B && c <= 0xFF40) || (c >= 0xFF5B && c <= 0xFF65);
}

// Simple case mapping for Latin, Greek and Cyrillic capitals.
char32_t to_lower(char32_t c) {
  if (c >= 'A' && c <= 'Z') return c + 32;
  if (c < 0xC0) return c;
  if (c <= 0xDE) return c == 0xD7 ? c : c + 32;
  if (c >= 0x100 && c <= 0x17F) {
    if (c == 0x130) return 'i';
    if (c == 0x178) return 0xFF;
    bool odd_upper = (c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E);
    if (odd_upper) return (c % 2 == 1) ? c + 1 : c;
    if (c == 0x138 || c == 0x149 || c == 0x17F) return c;
    return (c % 2 == 0) ? c + 1 : c;
  }
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 32;
  if (c == 0x386) return 0x3AC;
  if (c >= 0x388 && c <= 0x38A) return c + 37;
  if (c == 0x38C) return 0x3CC;
  if (c == 0x38E || c == 0x38F) return c + 63;
  if (c >= 0x410 && c <= 0x42F) return c + 32;
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  return c;
}

}  // namespace

StopList StopList::parse(std::string_view text) {
  StopList list;
  list.digest_ = fnv1a64(text);
  const auto manifest = NameManifest::parse(text);
  for (const auto& w : manifest.names()) {
    list.words_.insert(ascii_lower(w));
  }
  return list;
}

const StopList& StopList::english() {
  static const StopList list = parse(embedded_stopwords_manifest());
  return list;
}

std::vector<std::string> preprocess(std::string_view text, const StopList& stop_list) {
  std::vector<std::string> tokens;
  const std::u32string cps = decode_utf8(text);
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && is_space(cps[i])) ++i;
    std::size_t start = i;
    while (i < cps.size() && !is_space(cps[i])) ++i;
    std::size_t end = i;
    while (start < end && is_punct(cps[start])) ++start;
    while (end > start && is_punct(cps[end - 1])) --end;
    if (start == end) continue;
    std::string token;
    for (std::size_t k = start; k < end; ++k) append_utf8(token, to_lower(cps[k]));
    if (stop_list.contains(token)) continue;
    tokens.push_back(std::move(token));
  }
  return tokens;
}

Polarity polarity(int stars, PolarityMap map) {
  if (stars <= 2) return Polarity::Negative;
  if (stars == 3) return map == PolarityMap::ThreeUp ? Polarity::Positive : Polarity::Neutral;
  return Polarity::Positive;
}

std::string_view polarity_name(Polarity p) {
  switch (p) {
    case Polarity::Negative: return "negative";
    case Polarity::Positive: return "positive";
    case Polarity::Neutral: break;
  }
  return "neutral";
}

std::optional<PolarityMap> parse_polarity_map(std::string_view name) {
  if (name == "three_up") return PolarityMap::ThreeUp;
  if (name == "drop_three") return PolarityMap::DropThree;
  return std::nullopt;
}

Vocabulary::Vocabulary(std::vector<std::string> terms) : terms_(std::move(terms)) {
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], i).second) throw DataError("duplicate vocabulary term " + terms_[i]);
  }
}

std::optional<std::size_t> Vocabulary::index(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& documents,
                            std::size_t max_size) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& doc : documents) {
    for (const auto& t : doc) ++counts[t];
  }
  if (counts.empty()) throw DataError("cannot build a vocabulary from an empty corpus");
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > max_size) ranked.resize(max_size);
  std::vector<std::string> terms;
  terms.reserve(ranked.size());
  for (auto& [t, _] : ranked) terms.push_back(t);
  return Vocabulary(std::move(terms));
}

std::vector<int> bow_vector(const std::vector<std::string>& tokens, const Vocabulary& vocabulary) {
  std::vector<int> counts(vocabulary.size(), 0);
  for (const auto& t : tokens) {
    if (auto idx = vocabulary.index(t)) ++counts[*idx];
  }
  return counts;
}

std::vector<int> bow_vector(const std::vector<std::vector<std::string>>& documents,
                            const Vocabulary& vocabulary) {
  std::vector<int> counts(vocabulary.size(), 0);
  for (const auto& doc : documents) {
    for (const auto& t : doc) {
      if (auto idx = vocabulary.index(t)) ++counts[*idx];
    }
  }
  return counts;
}

std::optional<ExtremeReviews> select_extreme_reviews(const std::vector<corpus::ReviewRecord>& reviews,
                                                     Rng& rng, const StopList& stop_list) {
  if (reviews.empty()) return std::nullopt;
  // Candidates in review-id order so the draw does not depend on input order.
  std::vector<const corpus::ReviewRecord*> sorted;
  for (const auto& r : reviews) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->review_id < b->review_id; });
  int hi = sorted.front()->stars, lo = hi;
  for (const auto* r : sorted) {
    hi = std::max(hi, r->stars);
    lo = std::min(lo, r->stars);
  }
  auto pick = [&](int stars) {
    std::vector<const corpus::ReviewRecord*> c;
    for (const auto* r : sorted) {
      if (r->stars == stars) c.push_back(r);
    }
    return c.size() == 1 ? c.front() : c[rng.index(c.size())];
  };
  ExtremeReviews e;
  e.worst = *pick(lo);
  e.best = *pick(hi);
  e.concatenated = preprocess(e.worst.text, stop_list);
  e.concatenated.emplace_back(kSeparator);
  for (auto& t : preprocess(e.best.text, stop_list)) e.concatenated.push_back(std::move(t));
  return e;
}

std::string bow_column(std::string_view term) {
  std::string out = "bow.";
  for (char c : term) {
    if (c == '%') {
      out += "%25";
    } else if (c == ',') {
      out += "%2C";
    } else if (c == '"') {
      out += "%22";
    } else {
      out += c;
    }
  }
  return out;
}

TextResult compute_text_features(const corpus::Snapshot& snapshot,
                                 const std::vector<std::string>& restaurant_ids,
                                 const TextConfig& config) {
  TextResult result;
  std::set<std::string> wanted(restaurant_ids.begin(), restaurant_ids.end());
  std::map<std::string, std::vector<corpus::ReviewRecord>> by_business;
  const Timestamp end = snapshot.period_end();
  for (const auto& r : snapshot.reviews()) {
    if (r.timestamp >= end || !wanted.count(r.business_id)) continue;
    by_business[r.business_id].push_back(r);
  }
  for (const auto& [id, reviews] : by_business) {
    for (const auto& r : reviews) {
      result.reviews.push_back(
          {r.review_id, r.business_id, r.stars, polarity(r.stars, config.polarity_map), preprocess(r.text)});
    }
  }
  std::sort(result.reviews.begin(), result.reviews.end(),
            [](const auto& a, const auto& b) { return a.review_id < b.review_id; });

  std::vector<std::vector<std::string>> docs;
  docs.reserve(result.reviews.size());
  for (const auto& r : result.reviews) docs.push_back(r.tokens);
  result.vocabulary = build_vocabulary(docs, config.vocabulary_size);

  std::map<std::string, std::vector<std::size_t>> review_rows;
  for (std::size_t i = 0; i < result.reviews.size(); ++i) {
    review_rows[result.reviews[i].business_id].push_back(i);
  }

  auto& table = result.bow;
  table.family = "linguistic";
  for (const auto& t : result.vocabulary.terms()) table.columns.push_back(bow_column(t));
  table.values = Matrix(0, table.columns.size());
  Rng rng(config.seed);
  for (const auto& id : wanted) {
    auto it = by_business.find(id);
    if (it == by_business.end()) {
      result.without_reviews.push_back(id);
      continue;
    }
    std::vector<double> row(result.vocabulary.size(), 0.0);
    for (std::size_t i : review_rows[id]) {
      for (const auto& t : result.reviews[i].tokens) {
        if (auto idx = result.vocabulary.index(t)) row[*idx] += 1.0;
      }
    }
    table.ids.push_back(id);
    table.values.append_row(row);
    result.extremes.emplace(id, *select_extreme_reviews(it->second, rng));
  }
  return result;
}

std::string review_polarity_jsonl(const std::vector<TokenizedReview>& reviews) {
  std::string out;
  for (const auto& r : reviews) {
    nlohmann::ordered_json j;
    j["review_id"] = r.review_id;
    j["business_id"] = r.business_id;
    j["stars"] = r.stars;
    j["polarity"] = polarity_name(r.polarity);
    j["tokens"] = r.tokens;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<TokenizedReview> read_review_polarity_jsonl(std::string_view content) {
  std::vector<TokenizedReview> out;
  std::size_t start = 0, line_no = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    auto line = content.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      auto j = json::parse(line);
      TokenizedReview r;
      r.review_id = j.at("review_id").get<std::string>();
      r.business_id = j.at("business_id").get<std::string>();
      r.stars = j.at("stars").get<int>();
      auto p = j.at("polarity").get<std::string>();
      r.polarity = p == "positive" ? Polarity::Positive
                   : p == "negative" ? Polarity::Negative
                                     : Polarity::Neutral;
      r.tokens = j.at("tokens").get<std::vector<std::string>>();
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw DataError("review_polarity.jsonl:" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string extreme_reviews_jsonl(const std::map<std::string, ExtremeReviews>& extremes) {
  std::string out;
  for (const auto& [id, e] : extremes) {
    nlohmann::ordered_json j;
    j["business_id"] = id;
    j["worst_review_id"] = e.worst.review_id;
    j["worst_stars"] = e.worst.stars;
    j["best_review_id"] = e.best.review_id;
    j["best_stars"] = e.best.stars;
    j["tokens"] = e.concatenated;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string vocabulary_json(const Vocabulary& vocabulary) {
  nlohmann::ordered_json j;
  j["size"] = vocabulary.size();
  j["terms"] = vocabulary.terms();
  return j.dump(1) + "\n";
}

Vocabulary read_vocabulary_json(std::string_view content) {
  try {
    return Vocabulary(json::parse(content).at("terms").get<std::vector<std::string>>());
  } catch (const json::exception& e) {
    throw DataError(std::string("vocabulary.json: ") + e.what());
  }
}

}  // namespace bizsurv::text
