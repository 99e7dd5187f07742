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

#include <optional>
#include <vector>

#include "oed/objective.hpp"

namespace oed {

struct OptimizerConfig {
    int steps = 1000;
    double step_size = 0.5;
    bool backtracking = true;   // off mimics the plain fixed-step descent
    double eta = 0.0;           // proximal weight; falls back to the context's
    std::optional<ControlGrid> u_ref;
    double tol_grad = 0.0;      // 0 runs all steps
    bool record_history = true;

    void validate() const;
};

struct OptimizeResult {
    ControlGrid u_opt;
    std::vector<double> cost_history;
    double final_cost = 0.0;
    double active_set_fraction = 0.0;  // fraction of entries sitting at +-1
    int iterations_run = 0;
};

/// Sign of the interval-averaged design kernel, the exact solution of the
/// unpenalized (alpha = 0) problem; sign(0) resolves to +1.
ControlGrid initial_guess(const Discretization& disc, const DesignContext& ctx);

/// Projected gradient ascent of the discretized cost over the box |u| <= 1.
/// With backtracking the step is halved until the cost does not decrease and
/// the history is nondecreasing; without it, the fixed step is applied as is.
OptimizeResult solve(const LinearParamSystem& sys, const Discretization& disc,
                     const DesignContext& ctx, const Weighting& weighting,
                     const OptimizerConfig& cfg,
                     const std::optional<ControlGrid>& start = std::nullopt);

}  // namespace oed
