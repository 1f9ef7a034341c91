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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "bizsurv/common/error.hpp"
#include "bizsurv/geo/geo.hpp"
#include "bizsurv/learn/metrics.hpp"
#include "bizsurv/pipeline/config.hpp"
#include "bizsurv/pipeline/stages.hpp"
#include "bizsurv/text/text.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

// JSON crosses the boundary as text; the Python wrapper converts it.
bizsurv::pipeline::RunConfig resolve(const std::string& overrides_json,
                                     const std::optional<std::filesystem::path>& config_file) {
  return bizsurv::pipeline::resolve_config(config_file, bizsurv::pipeline::process_environment(),
                                           json::parse(overrides_json));
}

py::dict run(const std::string& stage_name, const std::string& overrides_json,
             const std::optional<std::filesystem::path>& config_file,
             const bizsurv::pipeline::ExplainRequest& request) {
  auto stage = bizsurv::pipeline::parse_stage(stage_name);
  if (!stage) throw bizsurv::ConfigError("stage", "unknown stage '" + stage_name + "'");
  const auto config = resolve(overrides_json, config_file);
  bizsurv::pipeline::StageOutcome outcome;
  {
    py::gil_scoped_release release;
    outcome = bizsurv::pipeline::run_stage(*stage, config, request);
  }
  py::dict d;
  d["skipped"] = outcome.skipped;
  d["outputs"] = outcome.outputs;
  d["messages"] = outcome.messages;
  return d;
}

}  // namespace

PYBIND11_MODULE(_bizsurv, m) {
  m.doc() = "Business survival prediction pipeline";

  auto error = py::register_exception<bizsurv::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<bizsurv::DataError>(m, "DataError", error.ptr());
  py::register_exception<bizsurv::ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<bizsurv::MissingArtifactError>(m, "MissingArtifactError", error.ptr());
  py::register_exception<bizsurv::pipeline::LockedError>(m, "LockedError", error.ptr());

  m.def("version", &bizsurv::pipeline::version_string);
  m.def("stages", [] {
    std::vector<std::string> names;
    for (auto s : bizsurv::pipeline::all_stages()) names.emplace_back(bizsurv::pipeline::stage_name(s));
    return names;
  });
  m.def("default_config_json", [] { return bizsurv::pipeline::default_config_json().dump(); });
  m.def(
      "resolve_config_json",
      [](const std::string& overrides, const std::optional<std::filesystem::path>& config_file) {
        return resolve(overrides, config_file).resolved.dump();
      },
      py::arg("overrides") = "{}", py::arg("config_file") = std::nullopt);

  py::class_<bizsurv::pipeline::ExplainRequest>(m, "ExplainRequest")
      .def(py::init<>())
      .def_readwrite("business_id", &bizsurv::pipeline::ExplainRequest::business_id)
      .def_readwrite("review_id", &bizsurv::pipeline::ExplainRequest::review_id)
      .def_readwrite("model", &bizsurv::pipeline::ExplainRequest::model)
      .def_readwrite("features", &bizsurv::pipeline::ExplainRequest::features)
      .def_readwrite("top_k", &bizsurv::pipeline::ExplainRequest::top_k)
      .def_readwrite("samples", &bizsurv::pipeline::ExplainRequest::samples)
      .def_readwrite("seed", &bizsurv::pipeline::ExplainRequest::seed)
      .def_readwrite("format", &bizsurv::pipeline::ExplainRequest::format);

  m.def("run_stage", &run, py::arg("stage"), py::arg("overrides") = "{}",
        py::arg("config_file") = std::nullopt, py::arg("request") = bizsurv::pipeline::ExplainRequest{});

  m.def(
      "roc_auc",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        return bizsurv::learn::roc_auc(scores, labels).auc;
      },
      py::arg("scores"), py::arg("labels"));
  m.def(
      "haversine",
      [](double lat1, double lon1, double lat2, double lon2) {
        return bizsurv::geo::geo_distance({lat1, lon1}, {lat2, lon2});
      },
      "Great-circle distance in meters.");
  m.def("preprocess", [](const std::string& text) { return bizsurv::text::preprocess(text); });
  m.def(
      "polarity",
      [](int stars, const std::string& map) {
        auto parsed = bizsurv::text::parse_polarity_map(map);
        if (!parsed) throw bizsurv::ConfigError("text.polarity_map", "unknown mapping '" + map + "'");
        return std::string(bizsurv::text::polarity_name(bizsurv::text::polarity(stars, *parsed)));
      },
      py::arg("stars"), py::arg("map") = "three_up");
}
