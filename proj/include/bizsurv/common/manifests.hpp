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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bizsurv {

// Raw text of the manifests shipped in data/, compiled in at build time.
std::string_view embedded_categories_manifest();
std::string_view embedded_cuisines_manifest();
std::string_view embedded_stopwords_manifest();

// Ordered list of names, one per line; '#' lines are comments.
// Lookup is case-insensitive.
class NameManifest {
 public:
  static NameManifest parse(std::string_view text);
  static NameManifest load(const std::filesystem::path& path);

  // The 22 top-level business categories.
  static const NameManifest& categories();
  // The 145 restaurant cuisine subcategories.
  static const NameManifest& cuisines();

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_[i]; }
  std::optional<std::size_t> find(std::string_view name) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;  // lowercased
};

std::string ascii_lower(std::string_view s);

}  // namespace bizsurv
