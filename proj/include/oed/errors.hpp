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

#include <stdexcept>
#include <string>

namespace oed {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error("dimension mismatch: " + msg) {}
};

struct NonFiniteMatrix : Error {
    explicit NonFiniteMatrix(const std::string& msg) : Error("non-finite matrix: " + msg) {}
};

struct SingularCovariance : Error {
    explicit SingularCovariance(const std::string& msg) : Error("singular covariance: " + msg) {}
};

struct UnsupportedDimension : Error {
    explicit UnsupportedDimension(const std::string& msg) : Error("unsupported dimension: " + msg) {}
};

struct DegenerateEigenvalue : Error {
    explicit DegenerateEigenvalue(const std::string& msg) : Error("degenerate eigenvalue: " + msg) {}
};

struct SingularGram : Error {
    explicit SingularGram(const std::string& msg) : Error("singular Gram matrix: " + msg) {}
};

struct NonFiniteCost : Error {
    explicit NonFiniteCost(const std::string& msg) : Error("non-finite cost: " + msg) {}
};

// Configuration errors carry the offending config path (e.g. "system.sigma").
struct ConfigError : Error {
    std::string path;
    ConfigError(std::string path_, const std::string& msg)
        : Error("config error at '" + path_ + "': " + msg), path(std::move(path_)) {}
};

}  // namespace oed
