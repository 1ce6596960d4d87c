#include "hj/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hj/kernels.hpp"

namespace hj::trainer {

namespace {

enum Stream : std::uint64_t {
    kInterior = 1,
    kBoundary = 2,
    kSupervised = 3,
    kInitial = 4,
    kTimeDraw = 5,
};

struct OptimizerState {
    std::vector<double> m;
    std::vector<double> v;
    long step = 0;

    void reset(std::size_t n) {
        m.assign(n, 0.0);
        v.assign(n, 0.0);
        step = 0;
    }
};

double spatial_radius(const geometry::Domain& domain) {
    const geometry::Domain& body =
        domain.kind() == geometry::DomainKind::ProductWithTorus ? domain.base() : domain;
    auto [lo, hi] = body.bounding_box();
    double s = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        s += std::max(lo[i] * lo[i], hi[i] * hi[i]);
    }
    return std::sqrt(s);
}

// Fixed datasets for the epoch-mode ablation, drawn once per stage.
struct FixedData {
    std::vector<Point> interior;
    std::vector<Point> boundary;
    std::vector<double> boundary_values;
};

struct RunState {
    OptimizerState opt;
    long global_iter = 0;  // advances across stages so streams never repeat
    long sampler_draws = 0;
    std::chrono::steady_clock::time_point t0;
};

void append_time(std::vector<Point>& pts, Rng& rng, double t_lo, double t_hi) {
    for (auto& p : pts) p.push_back(rng.uniform(t_lo, t_hi));
}

loss::Batch draw_batch(const Problem& problem, const SgdConfig& sgd, const SamplingPlan& plan,
                       const SchemeConfig& cfg, std::uint64_t seed, long iter,
                       const FixedData* fixed, long epoch_iter, RunState& rs) {
    loss::Batch batch;
    const auto iter_seed = [&](Stream s) {
        return derive_seed(derive_seed(seed, s), static_cast<std::uint64_t>(iter));
    };

    if (fixed == nullptr) {
        geometry::SamplerSpec ispec{plan.interior_kind, iter_seed(kInterior), 0.0, {}};
        batch.interior = geometry::sample_interior(problem.domain, ispec, sgd.n_interior);
        ++rs.sampler_draws;
        if (sgd.n_boundary > 0) {
            geometry::SamplerSpec bspec{geometry::SamplerKind::UniformBoundary,
                                        iter_seed(kBoundary), 0.0, {}};
            auto bnd = geometry::sample_boundary(problem.domain, bspec, sgd.n_boundary);
            ++rs.sampler_draws;
            for (auto& bp : bnd) {
                batch.boundary_values.push_back(problem.boundary_value(bp.x, bp.tag));
                batch.boundary.push_back(std::move(bp.x));
            }
        }
    } else {
        // Epoch mode: slice the pre-drawn datasets; epoch_iter indexes batches
        // inside the current epoch's shuffled order.
        const long ipe = static_cast<long>(fixed->interior.size()) / sgd.n_interior;
        const long epoch = epoch_iter / ipe;
        const long slot = epoch_iter % ipe;
        std::vector<std::size_t> order(fixed->interior.size());
        std::iota(order.begin(), order.end(), 0);
        Rng shuffler(derive_seed(sgd.shuffle_seed, static_cast<std::uint64_t>(epoch)));
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(shuffler.uniform() * i);
            std::swap(order[i - 1], order[std::min(j, i - 1)]);
        }
        for (int k = 0; k < sgd.n_interior; ++k) {
            batch.interior.push_back(fixed->interior[order[slot * sgd.n_interior + k]]);
        }
        if (!fixed->boundary.empty() && sgd.n_boundary > 0) {
            std::vector<std::size_t> border(fixed->boundary.size());
            std::iota(border.begin(), border.end(), 0);
            Rng bshuffler(derive_seed(sgd.shuffle_seed + 1, static_cast<std::uint64_t>(epoch)));
            for (std::size_t i = border.size(); i > 1; --i) {
                const std::size_t j = static_cast<std::size_t>(bshuffler.uniform() * i);
                std::swap(border[i - 1], border[std::min(j, i - 1)]);
            }
            for (int k = 0; k < sgd.n_boundary; ++k) {
                const std::size_t idx = border[(slot * sgd.n_boundary + k) % border.size()];
                batch.boundary.push_back(fixed->boundary[idx]);
                batch.boundary_values.push_back(fixed->boundary_values[idx]);
            }
        }
    }

    if (sgd.n_supervised > 0 && !problem.supervised_points.empty()) {
        Rng rng(iter_seed(kSupervised));
        for (int k = 0; k < sgd.n_supervised; ++k) {
            const std::size_t idx = static_cast<std::size_t>(
                rng.uniform() * static_cast<double>(problem.supervised_points.size()));
            const std::size_t j = std::min(idx, problem.supervised_points.size() - 1);
            batch.supervised.push_back(problem.supervised_points[j]);
            batch.supervised_values.push_back(problem.supervised_values[j]);
        }
    }

    if (problem.time_dependent) {
        const double dt = cfg.delta_t.value();
        Rng trng(iter_seed(kTimeDraw));
        append_time(batch.interior, trng, 0.0, std::max(problem.horizon - dt, 0.0));
        append_time(batch.boundary, trng, 0.0, problem.horizon);
        if (sgd.n_initial > 0) {
            geometry::SamplerSpec ispec{plan.interior_kind, iter_seed(kInitial), 0.0, {}};
            auto pts = geometry::sample_interior(problem.domain, ispec, sgd.n_initial);
            ++rs.sampler_draws;
            for (auto& x : pts) {
                batch.initial_values.push_back(problem.initial_value(x));
                x.push_back(0.0);
                batch.initial.push_back(std::move(x));
            }
        }
    }
    return batch;
}

TrainReport run_stages(const Network& net, std::vector<double> theta, const Problem& problem,
                       const std::vector<Stage>& stages, double tau,
                       const loss::LossWeights& w, const SamplingPlan& plan,
                       std::uint64_t seed, bool reset_opt, const StageCallback& on_stage_end) {
    TrainReport report;
    report.seed = seed;
    RunState rs;
    rs.t0 = std::chrono::steady_clock::now();
    rs.opt.reset(theta.size());

    std::vector<double> grad(theta.size(), 0.0);
    const double radius = spatial_radius(problem.domain);
    const auto& kern = kernels::active();

    for (std::size_t s = 0; s < stages.size(); ++s) {
        const Stage& stage = stages[s];
        SgdConfig sgd = stage.sgd;
        sgd.validate();
        SchemeConfig cfg{stage.alpha, stage.delta, tau, stage.delta_t};
        cfg.validate();
        if (problem.time_dependent && !cfg.delta_t.has_value()) {
            throw std::invalid_argument("trainer: time-dependent problem needs delta_t per stage");
        }

        const double lhat = net.lipschitz_upper_bound(theta, radius);
        const auto cond = scheme::uniqueness_condition(problem.hamiltonian, cfg, std::max(lhat, 1e-12),
                                                       problem.domain.dim());
        report.lipschitz_estimates.push_back(lhat);
        report.condition_margins.push_back(cond.margin);
        report.condition_satisfied.push_back(cond.satisfied);
        if (reset_opt && s > 0) rs.opt.reset(theta.size());

        FixedData fixed;
        const bool epoch_mode = sgd.resample == SgdConfig::Resample::FixedDataset;
        long iterations = sgd.iterations;
        if (epoch_mode) {
            geometry::SamplerSpec ispec{plan.interior_kind,
                                        derive_seed(derive_seed(seed, kInterior), 0xfeedULL + s),
                                        0.0, {}};
            fixed.interior = geometry::sample_interior(problem.domain, ispec, sgd.dataset_interior);
            ++rs.sampler_draws;
            if (sgd.dataset_boundary > 0) {
                geometry::SamplerSpec bspec{geometry::SamplerKind::UniformBoundary,
                                            derive_seed(derive_seed(seed, kBoundary), 0xfeedULL + s),
                                            0.0, {}};
                auto bnd = geometry::sample_boundary(problem.domain, bspec, sgd.dataset_boundary);
                ++rs.sampler_draws;
                for (auto& bp : bnd) {
                    fixed.boundary_values.push_back(problem.boundary_value(bp.x, bp.tag));
                    fixed.boundary.push_back(std::move(bp.x));
                }
            }
            const long ipe = static_cast<long>(fixed.interior.size()) / sgd.n_interior;
            if (ipe < 1) throw std::invalid_argument("trainer: dataset smaller than batch");
            iterations = static_cast<long>(sgd.epochs) * ipe;
        }

        double initial_total = -1.0;
        for (long k = 0; k < iterations; ++k) {
            loss::Batch batch = draw_batch(problem, sgd, plan, cfg, seed, rs.global_iter,
                                           epoch_mode ? &fixed : nullptr, k, rs);
            const auto parts = problem.time_dependent
                                   ? loss::loss_grad_time(net, theta, problem.hamiltonian, cfg, w,
                                                          batch, grad)
                                   : loss::loss_grad(net, theta, problem.hamiltonian, cfg, w,
                                                     batch, grad);
            const double wall =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - rs.t0)
                    .count();
            report.trace.push_back({static_cast<int>(s), static_cast<int>(k), parts, wall});
            const double total = parts.total();
            if (initial_total < 0.0) initial_total = total;
            if (!std::isfinite(total) || total > 1e6 * initial_total + 1e-12) {
                report.diverged = true;
                report.failed_stage = static_cast<int>(s);
                report.theta = std::move(theta);
                report.sampler_draws = rs.sampler_draws;
                report.wall_seconds = std::chrono::duration<double>(
                                          std::chrono::steady_clock::now() - rs.t0)
                                          .count();
                return report;
            }

            ++rs.opt.step;
            if (sgd.rule == SgdConfig::StepRule::Constant) {
                kern.axpy(theta.size(), -sgd.eta, grad.data(), theta.data());
            } else {
                const double c1 = 1.0 - std::pow(sgd.beta1, static_cast<double>(rs.opt.step));
                const double c2 = 1.0 - std::pow(sgd.beta2, static_cast<double>(rs.opt.step));
                kern.adam_step(theta.size(), theta.data(), rs.opt.m.data(), rs.opt.v.data(),
                               grad.data(), sgd.eta, sgd.beta1, sgd.beta2, sgd.eps, c1, c2);
            }
            ++rs.global_iter;
        }
        if (on_stage_end) on_stage_end(static_cast<int>(s), theta);
    }

    report.theta = std::move(theta);
    report.sampler_draws = rs.sampler_draws;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - rs.t0).count();
    return report;
}

}  // namespace

void SgdConfig::validate() const {
    if (iterations < 0) throw std::invalid_argument("sgd: iterations must be >= 0");
    if (n_interior < 1) throw std::invalid_argument("sgd: interior batch size must be >= 1");
    if (n_boundary < 0 || n_supervised < 0 || n_initial < 0) {
        throw std::invalid_argument("sgd: batch sizes must be >= 0");
    }
    if (eta <= 0.0) throw std::invalid_argument("sgd: eta must be > 0");
    if (resample == Resample::FixedDataset) {
        if (epochs < 1) throw std::invalid_argument("sgd: epochs >= 1 required in epoch mode");
        if (dataset_interior < n_interior) {
            throw std::invalid_argument("sgd: dataset_interior must cover one batch");
        }
    }
}

Schedule::Schedule(std::vector<Stage> stages, double tau) : stages_(std::move(stages)), tau_(tau) {
    if (stages_.empty()) throw std::invalid_argument("schedule: at least one stage required");
    for (std::size_t i = 1; i < stages_.size(); ++i) {
        if (stages_[i].alpha > stages_[i - 1].alpha || stages_[i].delta > stages_[i - 1].delta) {
            throw std::invalid_argument("schedule: alpha and delta must be non-increasing");
        }
    }
    if (tau_ < 0.0) throw std::invalid_argument("schedule: tau must be >= 0");
}

TrainReport sgd_lxf(const Network& net, std::vector<double> theta0, const Problem& problem,
                    const SchemeConfig& cfg, const loss::LossWeights& w, const SgdConfig& sgd,
                    const SamplingPlan& plan, std::uint64_t seed) {
    Stage stage{cfg.alpha, cfg.delta, cfg.delta_t, sgd};
    return run_stages(net, std::move(theta0), problem, {stage}, cfg.tau, w, plan, seed, false, {});
}

TrainReport train_schedule(const Network& net, std::vector<double> theta0,
                           const Problem& problem, const Schedule& schedule,
                           const loss::LossWeights& w, const SamplingPlan& plan,
                           std::uint64_t seed, const StageCallback& on_stage_end) {
    return run_stages(net, std::move(theta0), problem, schedule.stages(), schedule.tau(), w, plan,
                      seed, schedule.reset_optimizer_between_stages, on_stage_end);
}

}  // namespace hj::trainer
