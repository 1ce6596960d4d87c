#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hj/loss.hpp"
#include "hj/problem.hpp"

namespace hj::trainer {

// SGD configuration for one refinement stage. Under EveryIteration fresh
// batches are drawn each step; FixedDataset pre-draws datasets once and
// reshuffles them into batches every epoch.
struct SgdConfig {
    int iterations = 0;  // K; FixedDataset derives it from epochs and sizes
    int n_interior = 1;
    int n_boundary = 0;
    int n_supervised = 0;
    int n_initial = 0;  // time-dependent initial-condition batch

    enum class StepRule { Constant, Adam };
    StepRule rule = StepRule::Adam;
    double eta = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    enum class Resample { EveryIteration, FixedDataset };
    Resample resample = Resample::EveryIteration;
    int epochs = 0;
    int dataset_interior = 0;
    int dataset_boundary = 0;
    std::uint64_t shuffle_seed = 0;

    void validate() const;
};

struct Stage {
    double alpha;
    double delta;
    std::optional<double> delta_t;
    SgdConfig sgd;
};

// Progressive refinement schedule; construction enforces non-increasing
// alpha_m and delta_m.
class Schedule {
public:
    explicit Schedule(std::vector<Stage> stages, double tau = 0.0);
    const std::vector<Stage>& stages() const { return stages_; }
    double tau() const { return tau_; }
    bool reset_optimizer_between_stages = false;

private:
    std::vector<Stage> stages_;
    double tau_ = 0.0;
};

struct SamplingPlan {
    geometry::SamplerKind interior_kind = geometry::SamplerKind::UniformInterior;
};

struct TraceRow {
    int stage;
    int iteration;
    loss::LossParts parts;
    double wall_ms;  // cumulative, measured
};

struct TrainReport {
    std::vector<TraceRow> trace;
    std::vector<double> theta;
    std::vector<double> condition_margins;  // per stage, at stage entry
    std::vector<bool> condition_satisfied;
    std::vector<double> lipschitz_estimates;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;
    bool diverged = false;
    int failed_stage = -1;
    long sampler_draws = 0;  // instrumentation: number of sampler invocations
};

using StageCallback = std::function<void(int stage, Span theta)>;

/// Algorithm 1: SGD with per-iteration resampling on a fixed (alpha, delta).
TrainReport sgd_lxf(const Network& net, std::vector<double> theta0, const Problem& problem,
                    const SchemeConfig& cfg, const loss::LossWeights& w, const SgdConfig& sgd,
                    const SamplingPlan& plan, std::uint64_t seed);

/// Algorithm 2: runs sgd_lxf per stage, threading theta and optimizer state.
TrainReport train_schedule(const Network& net, std::vector<double> theta0,
                           const Problem& problem, const Schedule& schedule,
                           const loss::LossWeights& w, const SamplingPlan& plan,
                           std::uint64_t seed, const StageCallback& on_stage_end = {});

}  // namespace hj::trainer
