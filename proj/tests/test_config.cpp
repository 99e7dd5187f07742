#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "oed/pipeline.hpp"

using namespace oed;
using nlohmann::json;

namespace {

json small_config() {
    json doc = oscillator_preset();
    doc["design"]["K"] = 40;
    doc["optimizer"]["steps"] = 30;
    doc["ensemble"]["N"] = 9;
    doc.erase("checks");
    return doc;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string rejection(const json& doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    FAIL("expected the config to be rejected");
    return {};
}

}  // namespace

TEST_CASE("config: the bundled preset parses and matches the checked-in file") {
    const json embedded = oscillator_preset();
    CHECK_NOTHROW(parse_config(embedded));

    const std::string path = std::string(OED_SOURCE_DIR) + "/presets/oscillator.json";
    std::ifstream in(path);
    REQUIRE_MESSAGE(in.good(), "presets/oscillator.json must exist");
    const json on_disk = json::parse(in);
    CHECK(on_disk == embedded);
}

TEST_CASE("config: malformed fixtures each fail with a distinct pointed error") {
    std::set<std::string> messages;
    int count = 0;
    const auto reject = [&](json doc) {
        messages.insert(rejection(doc));
        ++count;
    };

    json doc = small_config();
    doc["system"]["A"] = {{0.0, 1.0}};  // not square
    reject(doc);

    doc = small_config();
    doc["system"]["B"][1] = {{1.0, 0.0}};  // wrong input-map shape
    reject(doc);

    doc = small_config();
    doc["system"]["C"] = {{1.0, 0.0, 0.0}};  // C columns != n
    reject(doc);

    doc = small_config();
    doc["system"]["sigma"] = {{0.0}};  // rank-deficient noise
    reject(doc);

    doc = small_config();
    doc["system"]["T"] = -2.0;
    reject(doc);

    doc = small_config();  // two parameters so the covariance can be asymmetric
    doc["system"]["B"].push_back({{1.0}, {0.0}});
    doc["prior"]["mean"] = {0.0, 0.0};
    doc["prior"]["cov"] = {{1.0, 0.4}, {0.1, 1.0}};
    reject(doc);

    doc = small_config();
    doc["prior"]["cov"] = {{-0.5}};  // not positive definite
    reject(doc);

    doc = small_config();
    doc["prior"]["mean"] = {0.0, 0.0};  // prior dimension != p
    reject(doc);

    doc = small_config();
    doc["design"]["alpha"] = 0.0;
    reject(doc);

    doc = small_config();
    doc["design"]["K"] = 1;
    reject(doc);

    doc = small_config();
    doc["design"]["u_init"] = json::array();
    for (int k = 0; k < 40; ++k) doc["design"]["u_init"].push_back({1.5});  // |u| > 1
    reject(doc);

    doc = small_config();
    doc["optimizer"].erase("steps");  // missing required field
    reject(doc);

    doc = small_config();
    doc["ensemble"]["mode"] = "montecarlo";
    reject(doc);

    doc = small_config();
    doc["experiment"]["theta_true"] = {0.1, 0.2};
    reject(doc);

    CHECK(count == 14);
    CHECK(messages.size() == static_cast<std::size_t>(count));
}

TEST_CASE("config: hash is stable and sensitive") {
    const json a = small_config();
    json b = a;
    CHECK(config_hash(a) == config_hash(b));
    b["design"]["alpha"] = 1.3;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("pipeline: identical config and seed give byte-identical artifacts") {
    const ExperimentConfig cfg = parse_config(small_config());
    const std::string dir_a = "det_run_a";
    const std::string dir_b = "det_run_b";
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);

    const DesignRun run_a = run_design(cfg, DesignMethod::EnsembleAtoms, false);
    write_design_artifacts(cfg, run_a, dir_a);
    const DesignRun run_b = run_design(cfg, DesignMethod::EnsembleAtoms, false);
    write_design_artifacts(cfg, run_b, dir_b);

    for (const char* name :
         {"controls_ensemble-atoms.csv", "switching_ensemble-atoms.csv",
          "trajectory_ensemble-atoms.csv"}) {
        CHECK(slurp(dir_a + "/" + name) == slurp(dir_b + "/" + name));
    }

    const ExperimentOutcome oa = run_experiment(cfg, run_a.u);
    const ExperimentOutcome ob = run_experiment(cfg, run_b.u);
    CHECK(oa.theta_post(0) == ob.theta_post(0));
    CHECK(oa.sigma_post(0, 0) == ob.sigma_post(0, 0));
    CHECK(oa.y_avg(0) == ob.y_avg(0));
}

TEST_CASE("pipeline: ensemble-atoms with a single atom equals classical") {
    json doc = small_config();
    doc["ensemble"]["N"] = 1;
    const ExperimentConfig cfg = parse_config(doc);
    const DesignRun classical = run_design(cfg, DesignMethod::Classical, false);
    const DesignRun one_atom = run_design(cfg, DesignMethod::EnsembleAtoms, false);
    CHECK((classical.u.values - one_atom.u.values).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(classical.opt.final_cost - one_atom.opt.final_cost) < 1e-10);
}

TEST_CASE("pipeline: zero control experiment keeps the prior") {
    const ExperimentConfig cfg = parse_config(small_config());
    const ControlGrid u = ControlGrid::constant(cfg.K, 1, cfg.system.T, 0.0);
    const ExperimentOutcome out = run_experiment(cfg, u);
    CHECK(out.sigma_post(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(out.theta_post(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(out.information_gain == doctest::Approx(0.0));
}

TEST_CASE("pipeline: noiseless ensemble experiment shrinks toward the truth") {
    json doc = small_config();
    doc["system"]["sigma"] = {{1e-9}};  // effectively noiseless draw
    const ExperimentConfig cfg = parse_config(doc);
    const DesignRun run = run_design(cfg, DesignMethod::EnsembleExact, false);
    const ExperimentOutcome out = run_experiment(cfg, run.u);
    CHECK(out.theta_post(0) > 0.0);
    CHECK(out.theta_post(0) < 0.25);
}
