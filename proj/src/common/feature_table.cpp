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

#include "bizsurv/common/feature_table.hpp"

#include <charconv>
#include <sstream>

#include "bizsurv/common/error.hpp"
#include "bizsurv/common/io.hpp"

namespace bizsurv {
namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

void write_feature_csv(const FeatureTable& table, const std::filesystem::path& path) {
  std::string out = "business_id";
  for (const auto& c : table.columns) {
    if (c.find(',') != std::string::npos) throw Error("column name contains a comma: " + c);
    out += ',';
    out += c;
  }
  out += '\n';
  for (std::size_t r = 0; r < table.ids.size(); ++r) {
    out += table.ids[r];
    for (double v : table.values.row(r)) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

FeatureTable read_feature_csv(const std::filesystem::path& path, std::string family) {
  std::istringstream in(read_file(path));
  FeatureTable table;
  table.family = std::move(family);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty feature table " + path.string());
  auto header = split_commas(line);
  if (header.empty() || header[0] != "business_id") {
    throw DataError(path.string() + ": first column must be business_id");
  }
  for (std::size_t i = 1; i < header.size(); ++i) table.columns.emplace_back(header[i]);
  table.values = Matrix(0, table.columns.size());
  std::vector<double> row(table.columns.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split_commas(line);
    if (cells.size() != header.size()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " cells");
    }
    table.ids.emplace_back(cells[0]);
    for (std::size_t i = 1; i < cells.size(); ++i) {
      auto cell = cells[i];
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), row[i - 1]);
      if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": bad number '" +
                        std::string(cell) + "'");
      }
    }
    table.values.append_row(row);
  }
  return table;
}

}  // namespace bizsurv
