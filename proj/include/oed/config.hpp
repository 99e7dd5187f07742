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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oed/belief.hpp"
#include "oed/optimizer.hpp"
#include "oed/system.hpp"

namespace oed {

inline constexpr const char* kToolVersion = "0.1.0";

enum class DesignMethod { Classical, EnsembleAtoms, EnsembleExact };

DesignMethod parse_method(const std::string& name);
std::string method_name(DesignMethod method);

/// Fully validated experiment description; `raw` keeps the parsed document
/// for echoing and hashing.
struct ExperimentConfig {
    LinearParamSystem system;
    GaussianBelief prior;

    double alpha = 1.0;
    int K = 200;
    std::optional<Vec> V_override;
    std::optional<Mat> u_init;

    OptimizerConfig optimizer;
    std::uint64_t optimizer_seed = 0;

    std::string ensemble_mode = "atoms";  // "atoms" or "exact"
    int atoms_N = 51;
    double atoms_radius = 4.0;

    Vec theta_true;
    std::uint64_t noise_seed = 0;

    std::string out_dir = "out";
    std::vector<std::string> formats = {"csv", "json", "svg"};

    nlohmann::json checks;  // optional embedded acceptance thresholds
    nlohmann::json raw;
};

/// Parses and cross-validates a config document; throws ConfigError with the
/// offending path on any schema or consistency violation.
ExperimentConfig parse_config(const nlohmann::json& doc);

ExperimentConfig load_config_file(const std::string& path);

/// The bundled damped-oscillator preset (see presets/oscillator.json).
nlohmann::json oscillator_preset();

/// FNV-1a hash of the canonical serialization, as fixed-width hex.
std::string config_hash(const nlohmann::json& doc);

}  // namespace oed
