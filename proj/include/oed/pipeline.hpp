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

#include "oed/artifacts.hpp"
#include "oed/bayes.hpp"
#include "oed/config.hpp"
#include "oed/pmp.hpp"

namespace oed {

/// One solved design problem plus its optimality analysis.
struct DesignRun {
    std::string method;
    Vec V;
    ControlGrid u;
    OptimizeResult opt;
    PmpReport report;
};

/// Posterior summary of one simulated experiment.
struct ExperimentOutcome {
    Vec y_avg;
    Vec Y0;
    Mat Y;
    Vec theta_post;
    Mat sigma_post;
    double information_gain = 0.0;
    double max_x2 = 0.0;  // max_t |x^{theta_true}(t)|^2
    std::uint64_t seed = 0;
};

struct ReproduceResult {
    std::vector<DesignRun> runs;          // classical, ensemble-atoms, ensemble-exact
    std::vector<ExperimentOutcome> outcomes;
    nlohmann::json summary;
    bool checks_passed = true;
    std::vector<std::string> failures;
};

DesignRun run_design(const ExperimentConfig& cfg, DesignMethod method, bool paper_faithful);

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const ControlGrid& u);

/// Writes the per-method CSVs and the JSON fragment for one design run.
void write_design_artifacts(const ExperimentConfig& cfg, const DesignRun& run,
                            const std::string& dir);

nlohmann::json design_summary(const ExperimentConfig& cfg, const DesignRun& run);
nlohmann::json outcome_summary(const ExperimentOutcome& outcome);

/// Runs all three designs and experiments on one config, writes the comparison
/// artifacts and plots, and evaluates the config's embedded checks.
ReproduceResult reproduce_paper(const ExperimentConfig& cfg, const std::string& out_dir,
                                bool paper_faithful);

}  // namespace oed
