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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "oed/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitChecks = 4;

struct CommonArgs {
    std::string config_path;
    std::string method = "classical";
    std::string out_dir;
    bool paper_faithful = false;
    std::optional<std::uint64_t> seed;
    std::optional<int> atoms;
    std::optional<double> radius;
};

nlohmann::json load_doc(const CommonArgs& args) {
    nlohmann::json doc;
    if (args.config_path.empty()) {
        doc = oed::oscillator_preset();
    } else {
        std::ifstream in(args.config_path);
        if (!in) throw oed::ConfigError(args.config_path, "cannot open config file");
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw oed::ConfigError(args.config_path, std::string("invalid JSON: ") + e.what());
        }
    }
    // Overrides land in the document itself so the echo and hash stay honest.
    if (args.seed) doc["experiment"]["seed"] = *args.seed;
    if (args.atoms) doc["ensemble"]["N"] = *args.atoms;
    if (args.radius) doc["ensemble"]["radius"] = *args.radius;
    return doc;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool with_method) {
    cmd->add_option("--config", args.config_path, "config file (defaults to the bundled preset)");
    if (with_method)
        cmd->add_option("--method", args.method,
                        "classical | ensemble-atoms | ensemble-exact");
    cmd->add_option("--out", args.out_dir, "output directory (defaults to the config's)");
    cmd->add_flag("--paper-faithful", args.paper_faithful,
                  "fixed-step descent without backtracking");
    cmd->add_option("--seed", args.seed, "override the experiment noise seed");
    cmd->add_option("--atoms", args.atoms, "override the atom count N");
    cmd->add_option("--radius", args.radius, "override the atom truncation radius");
}

int cmd_design(const CommonArgs& args) {
    const oed::ExperimentConfig cfg = oed::parse_config(load_doc(args));
    const std::string dir = args.out_dir.empty() ? cfg.out_dir : args.out_dir;
    const oed::DesignMethod method = oed::parse_method(args.method);

    const oed::DesignRun run = oed::run_design(cfg, method, args.paper_faithful);
    oed::write_design_artifacts(cfg, run, dir);
    nlohmann::json summary = oed::design_summary(cfg, run);
    summary["config_hash"] = oed::config_hash(cfg.raw);
    summary["config"] = cfg.raw;
    summary["version"] = oed::kToolVersion;
    oed::write_json(dir + "/design_" + run.method + ".json", summary);

    std::printf("%s design: cost %.6f, active-set %.3f, PMP consistency %.4f -> %s\n",
                run.method.c_str(), run.opt.final_cost, run.opt.active_set_fraction,
                run.report.consistency, dir.c_str());
    return kExitOk;
}

int cmd_experiment(const CommonArgs& args) {
    const oed::ExperimentConfig cfg = oed::parse_config(load_doc(args));
    const std::string dir = args.out_dir.empty() ? cfg.out_dir : args.out_dir;
    const oed::DesignMethod method = oed::parse_method(args.method);

    const oed::DesignRun run = oed::run_design(cfg, method, args.paper_faithful);
    const oed::ExperimentOutcome outcome = oed::run_experiment(cfg, run.u);
    oed::write_design_artifacts(cfg, run, dir);
    nlohmann::json summary = oed::design_summary(cfg, run);
    summary["experiment"] = oed::outcome_summary(outcome);
    summary["config_hash"] = oed::config_hash(cfg.raw);
    summary["config"] = cfg.raw;
    summary["version"] = oed::kToolVersion;
    oed::write_json(dir + "/experiment_" + run.method + ".json", summary);

    std::printf("%s experiment: theta_post %.6f, sigma_post %.6f, info gain %.6f, max|x|^2 %.4f\n",
                run.method.c_str(), outcome.theta_post(0), outcome.sigma_post(0, 0),
                outcome.information_gain, outcome.max_x2);
    return kExitOk;
}

int cmd_pmp_report(const CommonArgs& args) {
    const oed::ExperimentConfig cfg = oed::parse_config(load_doc(args));
    const std::string dir = args.out_dir.empty() ? cfg.out_dir : args.out_dir;
    const oed::DesignMethod method = oed::parse_method(args.method);

    const oed::DesignRun run = oed::run_design(cfg, method, args.paper_faithful);
    oed::write_design_artifacts(cfg, run, dir);
    nlohmann::json report = oed::design_summary(cfg, run);
    report["config_hash"] = oed::config_hash(cfg.raw);
    report["version"] = oed::kToolVersion;
    report["delta_sw"] = run.report.delta_sw;
    report["singular_nodes"] = run.report.singular_nodes;
    oed::write_json(dir + "/pmp_" + run.method + ".json", report);

    std::printf("%s PMP report: consistency %.4f, LC min eig %.6f (%s) -> %s\n",
                run.method.c_str(), run.report.consistency, run.report.lc_min_eig,
                run.report.lc_pass ? "pass" : "fail", dir.c_str());
    return kExitOk;
}

int cmd_reproduce(const CommonArgs& args) {
    const oed::ExperimentConfig cfg = oed::parse_config(load_doc(args));
    const std::string dir = args.out_dir.empty() ? cfg.out_dir : args.out_dir;

    const oed::ReproduceResult result = oed::reproduce_paper(cfg, dir, args.paper_faithful);

    std::printf("%-16s %-12s %-12s %-12s %-10s\n", "method", "sigma_post", "theta_post",
                "max|x|^2", "cost");
    for (std::size_t i = 0; i < result.runs.size(); ++i) {
        const auto& o = result.outcomes[i];
        std::printf("%-16s %-12.4f %-12.4f %-12.4f %-10.4f\n", result.runs[i].method.c_str(),
                    o.sigma_post(0, 0), o.theta_post(0), o.max_x2,
                    result.runs[i].opt.final_cost);
    }
    std::printf("artifacts written to %s\n", dir.c_str());
    if (!result.checks_passed) {
        nlohmann::json failure = {{"failures", result.failures}};
        oed::write_json(dir + "/failure_report.json", failure);
        for (const std::string& f : result.failures)
            std::fprintf(stderr, "check failed: %s\n", f.c_str());
        return kExitChecks;
    }
    std::printf("all embedded checks passed\n");
    return kExitOk;
}

int cmd_validate(const CommonArgs& args) {
    oed::parse_config(load_doc(args));
    std::printf("config is valid\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian input design via classical and ensemble optimal control"};
    app.require_subcommand(1);

    CommonArgs args;
    CLI::App* design = app.add_subcommand("design", "solve one design problem");
    add_common(design, args, true);
    CLI::App* experiment =
        app.add_subcommand("experiment", "design, simulate the measurement, update the posterior");
    add_common(experiment, args, true);
    CLI::App* pmp = app.add_subcommand("pmp-report", "optimality analysis of a solved design");
    add_common(pmp, args, true);
    CLI::App* repro =
        app.add_subcommand("reproduce-paper", "run the bundled three-way comparison study");
    add_common(repro, args, false);
    CLI::App* validate = app.add_subcommand("validate-config", "schema-check a config file");
    validate->add_option("--config", args.config_path, "config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (design->parsed()) return cmd_design(args);
        if (experiment->parsed()) return cmd_experiment(args);
        if (pmp->parsed()) return cmd_pmp_report(args);
        if (repro->parsed()) return cmd_reproduce(args);
        if (validate->parsed()) return cmd_validate(args);
    } catch (const oed::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitConfig;
    } catch (const oed::Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return kExitNumerical;
    }
    return kExitOk;
}
