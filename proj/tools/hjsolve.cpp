// Experiment runner: binds JSON configs to training, evaluation, the grid
// oracle, control rollouts, and the success-rate sweep.
//
// Exit codes: 0 success, 1 numerical failure, 2 usage/config error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <Eigen/Dense>

#include "hj/config.hpp"
#include "hj/csv.hpp"
#include "hj/evaluate.hpp"
#include "hj/grid_oracle.hpp"
#include "hj/kernels.hpp"
#include "hj/theta_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hj;

namespace {

int thread_cap() {
    if (const char* env = std::getenv("HJSOLVE_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void run_parallel(int jobs, int n, const std::function<void(int)>& fn) {
    jobs = std::max(1, std::min({jobs, n, thread_cap()}));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

std::string metadata_line(const cli::ExperimentConfig& cfg, std::uint64_t seed) {
    json meta;
    meta["seed"] = seed;
    meta["kernels"] = kernels::active().name;
    meta["timestamp"] = static_cast<long>(std::time(nullptr));
    meta["config"] = cfg.resolved;
    return meta.dump();
}

void write_trace_csv(const std::string& path, const cli::ExperimentConfig& cfg,
                     const trainer::TrainReport& rep) {
    CsvWriter csv(path, metadata_line(cfg, rep.seed));
    csv.header({"stage", "iteration", "total", "residual_part", "boundary_part",
                "supervised_part", "initial_part", "wall_ms"});
    for (const auto& row : rep.trace) {
        csv.row({static_cast<std::int64_t>(row.stage), static_cast<std::int64_t>(row.iteration),
                 row.parts.total(), row.parts.residual, row.parts.boundary, row.parts.supervised,
                 row.parts.initial, row.wall_ms});
    }
}

void write_report_json(const std::string& path, const cli::ExperimentConfig& cfg,
                       const trainer::TrainReport& rep) {
    json r;
    r["seed"] = rep.seed;
    r["kernels"] = kernels::active().name;
    r["wall_seconds"] = rep.wall_seconds;
    r["diverged"] = rep.diverged;
    r["failed_stage"] = rep.failed_stage;
    r["condition_margins"] = rep.condition_margins;
    r["condition_satisfied"] = rep.condition_satisfied;
    r["lipschitz_estimates"] = rep.lipschitz_estimates;
    r["sampler_draws"] = rep.sampler_draws;
    if (!rep.trace.empty()) r["final_loss"] = rep.trace.back().parts.total();
    r["config"] = cfg.resolved;
    std::ofstream os(path);
    os << r.dump(2) << "\n";
}

evaluate::Evaluator make_evaluator(const Network& net, const std::vector<double>& theta) {
    return [&net, &theta](Span x) { return net.forward(theta, x); };
}

int cmd_train(const std::string& config_path, std::string out_dir,
              std::optional<std::uint64_t> seed_override, int jobs) {
    cli::ExperimentConfig cfg = cli::load_config(config_path);
    if (out_dir.empty()) out_dir = cfg.output_dir;
    fs::create_directories(out_dir);
    std::vector<std::uint64_t> seeds = cfg.seeds;
    if (seed_override) seeds = {*seed_override};

    std::atomic<bool> failed{false};
    run_parallel(jobs, static_cast<int>(seeds.size()), [&](int i) {
        const std::uint64_t seed = seeds[i];
        std::vector<double> theta0 = cfg.network.init(seed);
        trainer::TrainReport rep =
            trainer::train_schedule(cfg.network, std::move(theta0), cfg.problem, cfg.schedule,
                                    cfg.weights, cfg.sampling, seed);
        const std::string stem = out_dir + "/seed" + std::to_string(seed);
        save_theta(stem + "_theta.bin", cfg.network, rep.theta);
        write_trace_csv(stem + "_trace.csv", cfg, rep);
        write_report_json(stem + "_report.json", cfg, rep);
        if (rep.diverged) {
            failed = true;
            std::cerr << "seed " << seed << ": diverged at stage " << rep.failed_stage << "\n";
        }
    });
    return failed ? 1 : 0;
}

int cmd_evaluate(const std::string& config_path, const std::string& theta_path,
                 std::string out_dir) {
    cli::ExperimentConfig cfg = cli::load_config(config_path);
    if (out_dir.empty()) out_dir = cfg.output_dir;
    fs::create_directories(out_dir);
    auto [net, theta] = load_theta(theta_path);
    if (net.param_count() != cfg.network.param_count()) {
        throw cli::ConfigError("theta file architecture disagrees with the config");
    }
    if (!cfg.ground_truth) {
        throw cli::ConfigError("evaluate: no ground truth available for this problem");
    }
    const auto approx = make_evaluator(net, theta);
    const double horizon = cfg.problem.time_dependent ? cfg.problem.horizon : 0.0;
    const auto rep = evaluate::mse_linf(approx, cfg.ground_truth, cfg.problem.domain,
                                        cfg.evaluation.n, cfg.evaluation.include_origin,
                                        cfg.evaluation.seed, horizon);
    json out;
    out["mse"] = rep.mse;
    out["linf"] = rep.linf;
    out["n_samples"] = rep.n_samples;
    out["include_origin"] = rep.include_origin;
    out["seed"] = rep.seed;
    out["config"] = cfg.resolved;
    std::ofstream os(out_dir + "/metrics.json");
    os << out.dump(2) << "\n";
    std::cout << "mse " << format_double(rep.mse) << "  linf " << format_double(rep.linf) << "\n";

    // Residual heat map over a 2D cross-section through the domain center.
    if (!cfg.problem.time_dependent) {
        const auto& stages = cfg.schedule.stages();
        SchemeConfig scfg{stages.back().alpha, stages.back().delta, cfg.schedule.tau(),
                          stages.back().delta_t};
        std::optional<evaluate::CrossSection> section;
        if (cfg.problem.domain.dim() > 2) {
            evaluate::CrossSection cs;
            cs.fixed = Point(cfg.problem.domain.dim(), 0.0);
            section = cs;
        }
        const auto field = evaluate::residual_field(approx, cfg.problem.hamiltonian, scfg,
                                                    cfg.problem.domain, 101, section);
        CsvWriter csv(out_dir + "/residual_field.csv", metadata_line(cfg, rep.seed));
        std::vector<std::string> cols;
        const int dim = field.points.empty() ? 0 : static_cast<int>(field.points[0].size());
        for (int i = 0; i < dim; ++i) cols.push_back("x" + std::to_string(i + 1));
        cols.push_back("sq_residual");
        csv.header(cols);
        for (std::size_t i = 0; i < field.points.size(); ++i) {
            std::vector<CsvCell> cells;
            for (double c : field.points[i]) cells.emplace_back(c);
            cells.emplace_back(field.values[i]);
            csv.row(cells);
        }
    }
    return 0;
}

int cmd_oracle(const std::string& config_path, std::string out_dir) {
    cli::ExperimentConfig cfg = cli::load_config(config_path);
    if (out_dir.empty()) out_dir = cfg.output_dir;
    fs::create_directories(out_dir);
    const auto& spec = cfg.oracle;
    const Hamiltonian& h = cfg.problem.hamiltonian;
    if (h.required_dim() != 0 && h.required_dim() != spec.d) {
        throw cli::ConfigError("oracle: hamiltonian dimension disagrees with oracle.d");
    }

    // Laplacian eigenvalue exactness across desk-scale grids.
    {
        CsvWriter csv(out_dir + "/oracle_eigenvalues.csv", metadata_line(cfg, 0));
        csv.header({"d", "N", "analytic", "numeric", "abs_err"});
        for (int d = 1; d <= 2; ++d) {
            for (int N = 3; N <= 8; ++N) {
                grid_oracle::GridSpec grid{d, N};
                const double analytic = grid_oracle::smallest_laplacian_eigenvalue(grid);
                SchemeConfig scfg{1.0, grid.delta(), 0.0, {}};
                const auto sys = grid_oracle::assemble_adjoint(
                    Hamiltonian::eikonal_squared(), scfg, grid,
                    std::vector<double>(grid.total_nodes(), 0.0));
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-sys.laplacian);
                const double numeric = es.eigenvalues().minCoeff();
                csv.row({static_cast<std::int64_t>(d), static_cast<std::int64_t>(N), analytic,
                         numeric, std::abs(analytic - numeric)});
            }
        }
    }

    // Monotone fixed-point solve on the unit cube with g = 0.
    grid_oracle::GridSpec grid{spec.d, spec.N};
    SchemeConfig scfg{spec.alpha, grid.delta(), spec.tau, {}};
    const double step = grid.delta() / (4.0 * spec.d * spec.alpha);
    const auto fp = grid_oracle::solve_fd_fixed_point(
        h, scfg, grid, [](Span) { return 0.0; }, step, spec.max_iters, spec.tol);
    {
        CsvWriter csv(out_dir + "/oracle_solution.csv", metadata_line(cfg, 0));
        std::vector<std::string> cols;
        for (int i = 0; i < spec.d; ++i) cols.push_back("i" + std::to_string(i + 1));
        cols.push_back("x_value");
        cols.push_back("u");
        csv.header(cols);
        for (std::size_t f = 0; f < grid.total_nodes(); ++f) {
            const auto beta = grid.multi_index(f);
            std::vector<CsvCell> cells;
            for (int b : beta) cells.emplace_back(static_cast<std::int64_t>(b));
            cells.emplace_back(grid.delta() * beta[0]);
            cells.emplace_back(fp.u.values[f]);
            csv.row(cells);
        }
    }

    // Adjoint spectrum at the solved grid function.
    const auto sys = grid_oracle::assemble_adjoint(h, scfg, grid, fp.u.values);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.matrix);
    {
        CsvWriter csv(out_dir + "/oracle_spectrum.csv", metadata_line(cfg, 0));
        csv.header({"index", "singular_value"});
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
            csv.row({static_cast<std::int64_t>(i), svd.singularValues()(i)});
        }
    }

    const double lip = grid_oracle::grid_lipschitz(grid, fp.u.values);
    const auto cond = scheme::uniqueness_condition(h, scfg, std::max(lip, 1e-12), spec.d);
    json rep;
    rep["fixed_point_converged"] = fp.converged;
    rep["fixed_point_iterations"] = fp.iterations;
    rep["fixed_point_residual"] = fp.final_residual;
    rep["grid_lipschitz"] = lip;
    rep["condition_margin"] = cond.margin;
    rep["condition_satisfied"] = cond.satisfied;
    rep["sigma_min"] = svd.singularValues().size() > 0 ? svd.singularValues().minCoeff() : 0.0;
    rep["config"] = cfg.resolved;
    std::ofstream os(out_dir + "/oracle_report.json");
    os << rep.dump(2) << "\n";
    if (!fp.converged) {
        std::cerr << "oracle: fixed point not converged, residual " << fp.final_residual << "\n";
        return 1;
    }
    return 0;
}

int cmd_rollout(const std::string& config_path, const std::string& theta_path,
                const std::string& states_path, std::string out_dir) {
    cli::ExperimentConfig cfg = cli::load_config(config_path);
    if (out_dir.empty()) out_dir = cfg.output_dir;
    fs::create_directories(out_dir);
    auto [net, theta] = load_theta(theta_path);
    const auto& net_ref = net;
    const auto& theta_ref = theta;
    const control::Value phi = [&net_ref, &theta_ref](Span x) {
        return net_ref.forward(theta_ref, x);
    };
    const double fd_delta =
        cfg.rollout.fd_delta.value_or(cfg.schedule.stages().back().delta);

    std::ifstream is(states_path);
    if (!is) throw cli::ConfigError("rollout: cannot open states file " + states_path);
    std::vector<Point> states;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        Point s;
        double v;
        while (ls >> v) s.push_back(v);
        if (!s.empty()) states.push_back(std::move(s));
    }

    bool all_done = true;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const std::string path = out_dir + "/trajectory" + std::to_string(i) + ".csv";
        if (cfg.rollout.kind == "car") {
            if (states[i].size() != 3) throw cli::ConfigError("rollout: car rows need x,y,omega");
            const control::CarState s0{states[i][0], states[i][1], states[i][2]};
            const auto tr = control::rollout_car(phi, cfg.rollout.car, s0, cfg.rollout.dt,
                                                 cfg.rollout.t_max, cfg.rollout.target_radius,
                                                 fd_delta);
            CsvWriter csv(path, metadata_line(cfg, i));
            csv.header({"t", "x", "y", "omega", "a", "b", "distance"});
            for (const auto& row : tr.rows) {
                csv.row({row.t, row.state.x, row.state.y, row.state.omega,
                         static_cast<std::int64_t>(row.control.a),
                         static_cast<std::int64_t>(row.control.b), row.distance});
            }
            std::cout << "state " << i
                      << (tr.outcome == control::CarOutcome::ReachedTarget ? ": reached target at t="
                                                                           : ": timeout at t=")
                      << tr.time << "\n";
            all_done = all_done && tr.outcome == control::CarOutcome::ReachedTarget;
        } else {
            if (states[i].size() != 4) {
                throw cli::ConfigError("rollout: game rows need X,Y,omega_e,omega_p");
            }
            const control::GameState s0{states[i][0], states[i][1], states[i][2], states[i][3]};
            const auto tr = control::rollout_game(phi, cfg.rollout.evader, cfg.rollout.pursuer, s0,
                                                  cfg.rollout.dt, cfg.rollout.t_max,
                                                  cfg.rollout.capture_radius,
                                                  cfg.rollout.escape_radius, fd_delta);
            CsvWriter csv(path, metadata_line(cfg, i));
            csv.header({"t", "X", "Y", "omega_e", "omega_p", "a_e", "b_e", "a_p", "b_p",
                        "distance"});
            for (const auto& row : tr.rows) {
                csv.row({row.t, row.state.X, row.state.Y, row.state.omega_e, row.state.omega_p,
                         static_cast<std::int64_t>(row.control.a_e),
                         static_cast<std::int64_t>(row.control.b_e),
                         static_cast<std::int64_t>(row.control.a_p),
                         static_cast<std::int64_t>(row.control.b_p), row.distance});
            }
            const char* what = tr.outcome == control::GameOutcome::Captured   ? "captured"
                               : tr.outcome == control::GameOutcome::Escaped ? "escaped"
                                                                             : "timeout";
            std::cout << "state " << i << ": " << what << " at t=" << tr.time << "\n";
        }
    }
    return all_done ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, std::string out_dir, int jobs) {
    cli::ExperimentConfig cfg = cli::load_config(config_path);
    if (out_dir.empty()) out_dir = cfg.output_dir;
    fs::create_directories(out_dir);
    if (!cfg.ground_truth) throw cli::ConfigError("sweep: ground truth required");

    struct Cell {
        double alpha, delta;
        evaluate::SuccessRate rate;
    };
    std::vector<std::pair<double, double>> grid_pairs;
    for (double a : cfg.sweep.alphas) {
        for (double d : cfg.sweep.deltas) grid_pairs.emplace_back(a, d);
    }
    std::vector<Cell> cells(grid_pairs.size());

    run_parallel(jobs, static_cast<int>(grid_pairs.size()), [&](int ci) {
        const auto [alpha, delta] = grid_pairs[ci];
        Problem problem = cfg.problem;
        if (cfg.sweep.supervised_count > 0) {
            geometry::SamplerSpec spec{geometry::SamplerKind::UniformInterior, 4242, 0.0, {}};
            problem.supervised_points =
                geometry::sample_interior(problem.domain, spec, cfg.sweep.supervised_count);
            problem.supervised_values.clear();
            for (const auto& p : problem.supervised_points) {
                problem.supervised_values.push_back(cfg.ground_truth(p));
            }
        }
        trainer::SgdConfig sgd = cfg.sgd_base;
        sgd.iterations = cfg.sweep.iterations;
        if (cfg.sweep.supervised_count > 0 && sgd.n_supervised == 0) {
            sgd.n_supervised = std::min(cfg.sweep.supervised_count, 10);
        }
        loss::LossWeights w = cfg.weights;
        if (cfg.sweep.supervised_count > 0 && w.gamma2 == 0.0) w.gamma2 = 1.0;
        SchemeConfig scfg{alpha, delta, cfg.schedule.tau(), {}};

        std::vector<std::vector<double>> thetas(cfg.seeds.size());
        for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
            auto rep = trainer::sgd_lxf(cfg.network, cfg.network.init(cfg.seeds[si]), problem,
                                        scfg, w, sgd, cfg.sampling, cfg.seeds[si]);
            thetas[si] = std::move(rep.theta);
        }
        std::vector<evaluate::Evaluator> runs;
        for (const auto& th : thetas) {
            runs.push_back([&cfg, th](Span x) { return cfg.network.forward(th, x); });
        }
        evaluate::SuccessCriterion crit{cfg.ground_truth, cfg.sweep.probes,
                                        cfg.sweep.match_fraction, 777};
        cells[ci] = {alpha, delta, evaluate::success_rate(runs, cfg.problem.domain, crit)};
    });

    CsvWriter csv(out_dir + "/sweep.csv", metadata_line(cfg, 0));
    csv.header({"alpha", "delta", "supervised_points", "success_rate", "half_width", "runs"});
    for (const auto& c : cells) {
        csv.row({c.alpha, c.delta, static_cast<std::int64_t>(cfg.sweep.supervised_count),
                 c.rate.rate, c.rate.half_width, static_cast<std::int64_t>(c.rate.runs)});
        std::cout << "alpha=" << c.alpha << " delta=" << c.delta << " success=" << c.rate.rate
                  << " +-" << c.rate.half_width << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hamilton-Jacobi least-squares solver suite"};
    app.require_subcommand(1);

    std::string config_path, theta_path, states_path, out_dir;
    std::optional<std::uint64_t> seed_override;
    int jobs = 1;

    auto add_common = [&](CLI::App* cmd, bool needs_theta = false, bool needs_states = false) {
        cmd->add_option("--config", config_path, "experiment config JSON")->required();
        cmd->add_option("--out", out_dir, "output directory (default from config)");
        if (needs_theta) cmd->add_option("--theta", theta_path, "theta file")->required();
        if (needs_states) {
            cmd->add_option("states", states_path, "initial states CSV")->required();
        }
    };

    auto* train = app.add_subcommand("train", "run the refinement schedule per seed");
    add_common(train);
    train->add_option("--seed", seed_override, "override the config seed list");
    train->add_option("--jobs", jobs, "parallel replicas");

    auto* eval = app.add_subcommand("evaluate", "score a trained network against ground truth");
    add_common(eval, true);

    auto* oracle = app.add_subcommand("oracle", "grid-based verification suite");
    add_common(oracle);

    auto* rollout = app.add_subcommand("rollout", "feedback-control trajectories");
    add_common(rollout, true, true);

    auto* sweep = app.add_subcommand("sweep", "success-rate study over (alpha, delta)");
    add_common(sweep);
    sweep->add_option("--jobs", jobs, "parallel cells");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (train->parsed()) return cmd_train(config_path, out_dir, seed_override, jobs);
        if (eval->parsed()) return cmd_evaluate(config_path, theta_path, out_dir);
        if (oracle->parsed()) return cmd_oracle(config_path, out_dir);
        if (rollout->parsed()) return cmd_rollout(config_path, theta_path, states_path, out_dir);
        if (sweep->parsed()) return cmd_sweep(config_path, out_dir, jobs);
    } catch (const cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
