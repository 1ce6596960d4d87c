#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hj/control.hpp"
#include "hj/evaluate.hpp"
#include "hj/problem.hpp"
#include "hj/trainer.hpp"

namespace hj::cli {

/// Raised on schema violations; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EvaluationSpec {
    int n = 100000;
    bool include_origin = true;
    std::uint64_t seed = 1234;
};

struct OracleSpec {
    int d = 1;
    int N = 64;
    double alpha = 1.0;
    double tau = 0.0;
    int max_iters = 400000;
    double tol = 1e-10;
};

struct SweepSpec {
    std::vector<double> alphas{2.0};
    std::vector<double> deltas{0.7, 0.2, 0.01};
    int iterations = 2000;
    int probes = 20000;
    double match_fraction = 0.99;
    int supervised_count = 0;  // ground-truth-labelled interior points added per run
};

struct RolloutSpec {
    std::string kind = "car";  // "car" | "game"
    double dt = 0.01;
    double t_max = 30.0;
    double target_radius = 0.2;
    double capture_radius = 0.2;
    double escape_radius = 4.0;
    control::CarParams car{1.0, 1.0};
    control::CarParams evader{0.8, 1.0};
    control::CarParams pursuer{1.0, 1.2};
    std::optional<double> fd_delta;  // defaults to the last stage delta
};

struct ExperimentConfig {
    Problem problem;
    Network network;
    trainer::Schedule schedule;
    loss::LossWeights weights;
    trainer::SamplingPlan sampling;
    EvaluationSpec evaluation;
    OracleSpec oracle;
    SweepSpec sweep;
    RolloutSpec rollout;
    std::vector<std::uint64_t> seeds{0};
    std::string output_dir = "out";
    trainer::SgdConfig sgd_base;  // per-stage iterations live in the schedule

    // Closed-form ground truth when the problem has one (Eikonal distance,
    // Riccati quadratic); empty otherwise.
    evaluate::Evaluator ground_truth;

    nlohmann::json resolved;  // full config with defaults applied

    ExperimentConfig(Problem p, Network n, trainer::Schedule s)
        : problem(std::move(p)), network(std::move(n)), schedule(std::move(s)) {}
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

}  // namespace hj::cli
