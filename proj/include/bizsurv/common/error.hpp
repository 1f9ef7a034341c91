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

#include <stdexcept>
#include <string>

namespace bizsurv {

// Base for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data cannot support the requested operation (empty corpus,
// mismatched snapshots, single-class labels, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class MissingArtifactError : public Error {
 public:
  explicit MissingArtifactError(std::string artifact)
      : Error("missing prerequisite artifact: " + artifact),
        artifact_(std::move(artifact)) {}
  const std::string& artifact() const { return artifact_; }

 private:
  std::string artifact_;
};

}  // namespace bizsurv
