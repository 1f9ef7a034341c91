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

#include <chrono>
#include <filesystem>
#include <string>
#include <unistd.h>
#include <vector>

#include "bizsurv/common/time.hpp"
#include "bizsurv/corpus/snapshot.hpp"

namespace bizsurv::testing {

inline Date ymd(int y, unsigned m, unsigned d) {
  return Date{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}};
}

inline Timestamp at(int y, unsigned m, unsigned d, int hour = 12) {
  return std::chrono::time_point_cast<std::chrono::seconds>(ymd(y, m, d)) + std::chrono::hours{hour};
}

inline corpus::BusinessRecord business(std::string id, double lat, double lon,
                                       std::vector<std::string> categories, bool open = true) {
  corpus::BusinessRecord b;
  b.business_id = std::move(id);
  b.name = b.business_id;
  b.latitude = lat;
  b.longitude = lon;
  b.categories = std::move(categories);
  b.is_open = open;
  return b;
}

inline corpus::ReviewRecord review(std::string id, std::string business_id, std::string user_id, int stars,
                                   Timestamp t, std::string text = "good food") {
  return {std::move(id), std::move(business_id), std::move(user_id), stars, t, std::move(text)};
}

// Fresh scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("bizsurv-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace bizsurv::testing
