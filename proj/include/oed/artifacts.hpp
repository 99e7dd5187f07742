/*
 Copyright 2026 The oed Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "oed/belief.hpp"

namespace oed {

/// One named curve for the SVG plots.
struct PlotSeries {
    std::string name;
    std::string color;
    Vec t;
    Vec y;
    bool step = false;  // render as a zero-order-hold staircase
};

/// All artifact files start with this comment so reruns are attributable.
std::string artifact_header(const std::string& config_hash, std::uint64_t seed);

/// CSV with a `# config=... seed=... version=...` header comment; column 0 is
/// the time axis.
void write_csv(const std::string& path, const std::string& config_hash, std::uint64_t seed,
               const std::vector<std::string>& columns, const Vec& t, const Mat& values);

void write_json(const std::string& path, const nlohmann::json& doc);

/// Standalone SVG line chart.
void write_svg(const std::string& path, const std::string& config_hash, std::uint64_t seed,
               const std::string& title, const std::string& xlabel, const std::string& ylabel,
               const std::vector<PlotSeries>& series);

}  // namespace oed
