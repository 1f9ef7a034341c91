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

#include "bizsurv/common/manifests.hpp"

#include <algorithm>
#include <cctype>

#include "bizsurv/common/error.hpp"
#include "bizsurv/common/io.hpp"

namespace bizsurv {

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

NameManifest NameManifest::parse(std::string_view text) {
  NameManifest m;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    if (!m.index_.emplace(ascii_lower(line), m.names_.size()).second) {
      throw DataError("duplicate manifest entry '" + std::string(line) + "'");
    }
    m.names_.emplace_back(line);
  }
  return m;
}

NameManifest NameManifest::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

const NameManifest& NameManifest::categories() {
  static const NameManifest m = parse(embedded_categories_manifest());
  return m;
}

const NameManifest& NameManifest::cuisines() {
  static const NameManifest m = parse(embedded_cuisines_manifest());
  return m;
}

std::optional<std::size_t> NameManifest::find(std::string_view name) const {
  auto it = index_.find(ascii_lower(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

}  // namespace bizsurv
