#include "hj/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "hj/grid_oracle.hpp"

namespace hj::cli {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& ctx, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.contains(key)) throw ConfigError(ctx + ": unknown key \"" + key + "\"");
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

Point parse_center(const json& j, int dim, const std::string& ctx) {
    if (j.contains("center")) {
        auto c = j.at("center").get<Point>();
        if (dim != 0 && static_cast<int>(c.size()) != dim) {
            throw ConfigError(ctx + ": center length disagrees with dim");
        }
        return c;
    }
    if (dim <= 0) throw ConfigError(ctx + ": need center or dim");
    return Point(dim, 0.0);
}

geometry::Domain parse_domain(const json& j, const std::string& ctx) {
    check_keys(j, ctx, {"kind", "dim", "center", "half_width", "radius", "inner_radius",
                        "outer_radius", "base", "torus_dims"});
    const std::string kind = j.at("kind").get<std::string>();
    const int dim = get_or(j, "dim", 0);
    if (kind == "cube") {
        return geometry::Domain::cube(parse_center(j, dim, ctx), j.at("half_width").get<double>());
    }
    if (kind == "ball") {
        return geometry::Domain::ball(parse_center(j, dim, ctx), j.at("radius").get<double>());
    }
    if (kind == "annulus") {
        return geometry::Domain::annulus(parse_center(j, dim, ctx),
                                         j.at("inner_radius").get<double>(),
                                         j.at("outer_radius").get<double>());
    }
    if (kind == "product_with_torus") {
        return geometry::Domain::product_with_torus(parse_domain(j.at("base"), ctx + ".base"),
                                                    j.at("torus_dims").get<int>());
    }
    throw ConfigError(ctx + ": unknown domain kind \"" + kind + "\"");
}

json domain_to_json(const geometry::Domain& d) {
    json j;
    switch (d.kind()) {
        case geometry::DomainKind::Cube:
            j = {{"kind", "cube"}, {"center", d.center()}, {"half_width", d.half_width()}};
            break;
        case geometry::DomainKind::Ball:
            j = {{"kind", "ball"}, {"center", d.center()}, {"radius", d.radius()}};
            break;
        case geometry::DomainKind::Annulus:
            j = {{"kind", "annulus"},
                 {"center", d.center()},
                 {"inner_radius", d.inner_radius()},
                 {"outer_radius", d.outer_radius()}};
            break;
        case geometry::DomainKind::ProductWithTorus:
            j = {{"kind", "product_with_torus"},
                 {"base", domain_to_json(d.base())},
                 {"torus_dims", d.torus_dims()}};
            break;
    }
    return j;
}

Hamiltonian parse_hamiltonian(const json& j) {
    check_keys(j, "hamiltonian",
               {"kind", "sigma", "rho", "sigma_e", "rho_e", "sigma_p", "rho_p"});
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "eikonal_squared") return Hamiltonian::eikonal_squared();
    if (kind == "eikonal_norm") return Hamiltonian::eikonal_norm();
    if (kind == "quadratic") return Hamiltonian::quadratic();
    if (kind == "reeds_shepp") {
        return Hamiltonian::reeds_shepp(get_or(j, "sigma", 1.0), get_or(j, "rho", 1.0));
    }
    if (kind == "pursuit_evasion") {
        return Hamiltonian::pursuit_evasion(get_or(j, "sigma_e", 0.8), get_or(j, "rho_e", 1.0),
                                            get_or(j, "sigma_p", 1.0), get_or(j, "rho_p", 1.2));
    }
    throw ConfigError("hamiltonian: unknown kind \"" + kind + "\"");
}

json hamiltonian_to_json(const Hamiltonian& h) {
    switch (h.kind()) {
        case Hamiltonian::Kind::EikonalSquared: return {{"kind", "eikonal_squared"}};
        case Hamiltonian::Kind::EikonalNorm: return {{"kind", "eikonal_norm"}};
        case Hamiltonian::Kind::Quadratic: return {{"kind", "quadratic"}};
        case Hamiltonian::Kind::ReedsShepp:
            return {{"kind", "reeds_shepp"}, {"sigma", h.sigma()}, {"rho", h.rho()}};
        case Hamiltonian::Kind::PursuitEvasion:
            return {{"kind", "pursuit_evasion"},
                    {"sigma_e", h.sigma_e()},
                    {"rho_e", h.rho_e()},
                    {"sigma_p", h.sigma_p()},
                    {"rho_p", h.rho_p()}};
    }
    return {};
}

// Dirichlet data per tag. A plain number applies to every tag; an object may
// distinguish the annulus shells.
std::function<double(Span, int)> parse_boundary_values(const json& j, json& resolved) {
    if (j.is_number()) {
        const double v = j.get<double>();
        resolved = v;
        return [v](Span, int) { return v; };
    }
    check_keys(j, "boundary_values", {"all", "inner", "outer"});
    const double all = get_or(j, "all", 0.0);
    const double inner = get_or(j, "inner", all);
    const double outer = get_or(j, "outer", all);
    resolved = {{"inner", inner}, {"outer", outer}};
    return [inner, outer](Span, int tag) { return tag == 1 ? outer : inner; };
}

Network parse_network(const json& j, const geometry::Domain& domain, bool time_dependent) {
    check_keys(j, "network", {"type", "hidden", "max_frequency", "groups"});
    const std::string type = get_or<std::string>(j, "type", "mlp");
    const auto hidden = j.at("hidden").get<std::vector<int>>();
    if (type == "mlp") {
        MlpArchitecture a;
        a.input_dim = domain.dim() + (time_dependent ? 1 : 0);
        a.hidden = hidden;
        return Network(a);
    }
    if (type == "periodic") {
        if (time_dependent) throw ConfigError("network: periodic nets are static-only here");
        if (domain.kind() != geometry::DomainKind::ProductWithTorus) {
            throw ConfigError("network: periodic type needs a product_with_torus domain");
        }
        PeriodicArchitecture a;
        a.spatial_dim = domain.base().dim();
        a.hidden = hidden;
        if (j.contains("groups")) {
            for (const auto& g : j.at("groups")) {
                check_keys(g, "network.groups[]", {"angle_index", "max_frequency"});
                a.groups.push_back(
                    {g.at("angle_index").get<int>(), g.at("max_frequency").get<int>()});
            }
        } else {
            const int nmax = j.at("max_frequency").get<int>();
            for (int k = 0; k < domain.torus_dims(); ++k) {
                a.groups.push_back({a.spatial_dim + k, nmax});
            }
        }
        if (static_cast<int>(a.groups.size()) != domain.torus_dims()) {
            throw ConfigError("network: one periodic group per torus dimension required");
        }
        return Network(a);
    }
    throw ConfigError("network: unknown type \"" + type + "\"");
}

trainer::SgdConfig parse_sgd(const json& j) {
    check_keys(j, "sgd",
               {"step_rule", "eta", "beta1", "beta2", "eps", "batch", "resample", "epochs",
                "dataset", "shuffle_seed"});
    trainer::SgdConfig sgd;
    const std::string rule = get_or<std::string>(j, "step_rule", "adam");
    if (rule == "adam") {
        sgd.rule = trainer::SgdConfig::StepRule::Adam;
    } else if (rule == "constant") {
        sgd.rule = trainer::SgdConfig::StepRule::Constant;
    } else {
        throw ConfigError("sgd: unknown step_rule \"" + rule + "\"");
    }
    sgd.eta = get_or(j, "eta", 1e-3);
    sgd.beta1 = get_or(j, "beta1", 0.9);
    sgd.beta2 = get_or(j, "beta2", 0.999);
    sgd.eps = get_or(j, "eps", 1e-8);
    if (j.contains("batch")) {
        const auto& b = j.at("batch");
        check_keys(b, "sgd.batch", {"interior", "boundary", "supervised", "initial"});
        sgd.n_interior = get_or(b, "interior", 1);
        sgd.n_boundary = get_or(b, "boundary", 0);
        sgd.n_supervised = get_or(b, "supervised", 0);
        sgd.n_initial = get_or(b, "initial", sgd.n_boundary);
    }
    const std::string resample = get_or<std::string>(j, "resample", "every_iteration");
    if (resample == "every_iteration") {
        sgd.resample = trainer::SgdConfig::Resample::EveryIteration;
    } else if (resample == "fixed_dataset") {
        sgd.resample = trainer::SgdConfig::Resample::FixedDataset;
        sgd.epochs = get_or(j, "epochs", 1);
        const auto& ds = j.at("dataset");
        check_keys(ds, "sgd.dataset", {"interior", "boundary"});
        sgd.dataset_interior = get_or(ds, "interior", 0);
        sgd.dataset_boundary = get_or(ds, "boundary", 0);
        sgd.shuffle_seed = get_or<std::uint64_t>(j, "shuffle_seed", 0);
    } else {
        throw ConfigError("sgd: unknown resample mode \"" + resample + "\"");
    }
    return sgd;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    check_keys(j, "config",
               {"problem", "network", "loss", "scheme", "schedule", "sgd", "sampling",
                "evaluation", "oracle", "sweep", "rollout", "seeds", "output_dir"});

    const auto& pj = j.at("problem");
    check_keys(pj, "problem",
               {"domain", "hamiltonian", "boundary_values", "supervised", "initial_condition",
                "time_horizon"});
    geometry::Domain domain = parse_domain(pj.at("domain"), "problem.domain");
    Hamiltonian ham = parse_hamiltonian(pj.at("hamiltonian"));
    const int req = ham.required_dim();
    if (req != 0 && domain.dim() != req) {
        throw ConfigError("problem: hamiltonian expects dimension " + std::to_string(req));
    }

    const bool time_dependent = pj.contains("time_horizon");
    const double horizon = time_dependent ? pj.at("time_horizon").get<double>() : 0.0;
    if (time_dependent && horizon <= 0.0) throw ConfigError("problem: time_horizon must be > 0");

    json resolved_bv = 0.0;
    std::function<double(Span, int)> bval = [](Span, int) { return 0.0; };
    if (pj.contains("boundary_values")) {
        bval = parse_boundary_values(pj.at("boundary_values"), resolved_bv);
    }

    // Initial condition (time-dependent problems only).
    std::function<double(Span)> u0;
    Point a_diag;
    if (pj.contains("initial_condition")) {
        const auto& ic = pj.at("initial_condition");
        check_keys(ic, "initial_condition", {"kind", "a_diag"});
        const std::string kind = ic.at("kind").get<std::string>();
        if (kind != "quadratic_form") {
            throw ConfigError("initial_condition: unknown kind \"" + kind + "\"");
        }
        a_diag = ic.at("a_diag").get<Point>();
        if (static_cast<int>(a_diag.size()) != domain.dim()) {
            throw ConfigError("initial_condition: a_diag length must equal the dimension");
        }
        const Point a = a_diag;
        u0 = [a](Span x) {
            double q = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) q += a[i] * x[i] * x[i];
            return 0.5 * (q - 1.0);
        };
    }
    if (time_dependent && !u0) throw ConfigError("problem: time-dependent runs need initial_condition");

    // Ground truth, resolved before supervised data may reference it.
    const auto& ej = j.contains("evaluation") ? j.at("evaluation") : json::object();
    check_keys(ej, "evaluation", {"n", "include_origin", "seed", "ground_truth"});
    std::string truth_kind = get_or<std::string>(ej, "ground_truth", "auto");
    evaluate::Evaluator truth;
    if (truth_kind == "auto") {
        const bool eikonal = ham.kind() == Hamiltonian::Kind::EikonalSquared ||
                             ham.kind() == Hamiltonian::Kind::EikonalNorm;
        const bool distance_domain = domain.kind() == geometry::DomainKind::Cube ||
                                     domain.kind() == geometry::DomainKind::Ball ||
                                     domain.kind() == geometry::DomainKind::Annulus;
        if (!time_dependent && eikonal && distance_domain) {
            truth_kind = "distance";
        } else if (time_dependent && ham.kind() == Hamiltonian::Kind::Quadratic && !a_diag.empty()) {
            truth_kind = "riccati";
        } else {
            truth_kind = "none";
        }
    }
    if (truth_kind == "distance") {
        truth = grid_oracle::distance_ground_truth(domain);
    } else if (truth_kind == "riccati") {
        if (a_diag.empty()) throw ConfigError("evaluation: riccati truth needs a_diag");
        const Point a = a_diag;
        const int d = domain.dim();
        truth = [a, d](Span xt) { return grid_oracle::riccati_truth(xt.subspan(0, d), xt[d], a); };
    } else if (truth_kind != "none") {
        throw ConfigError("evaluation: unknown ground_truth \"" + truth_kind + "\"");
    }

    // Supervised set: explicit points or ground-truth-labelled uniform draws.
    std::vector<Point> sup_pts;
    std::vector<double> sup_vals;
    if (pj.contains("supervised")) {
        const auto& sj = pj.at("supervised");
        check_keys(sj, "supervised", {"points", "values", "count", "seed"});
        if (sj.contains("points")) {
            for (const auto& p : sj.at("points")) sup_pts.push_back(p.get<Point>());
            sup_vals = sj.at("values").get<std::vector<double>>();
            if (sup_pts.size() != sup_vals.size()) {
                throw ConfigError("supervised: points/values size mismatch");
            }
        } else {
            const int count = sj.at("count").get<int>();
            if (!truth) throw ConfigError("supervised: count mode needs a ground truth");
            geometry::SamplerSpec spec{geometry::SamplerKind::UniformInterior,
                                       get_or<std::uint64_t>(sj, "seed", 99), 0.0, {}};
            sup_pts = geometry::sample_interior(domain, spec, count);
            for (const auto& p : sup_pts) sup_vals.push_back(truth(p));
        }
    }

    Network network = parse_network(j.at("network"), domain, time_dependent);

    loss::LossWeights weights;
    if (j.contains("loss")) {
        const auto& lj = j.at("loss");
        check_keys(lj, "loss", {"gamma1", "gamma2", "gamma0"});
        weights.gamma1 = get_or(lj, "gamma1", 0.0);
        weights.gamma2 = get_or(lj, "gamma2", 0.0);
        weights.gamma0 = get_or(lj, "gamma0", 0.0);
    }
    weights.validate();
    if (!time_dependent && weights.gamma1 <= 0.0) {
        throw ConfigError("loss: boundary-value problems need gamma1 > 0");
    }

    double tau = 0.0;
    if (j.contains("scheme")) {
        const auto& sj = j.at("scheme");
        check_keys(sj, "scheme", {"tau"});
        tau = get_or(sj, "tau", 0.0);
    }

    trainer::SgdConfig sgd_base =
        j.contains("sgd") ? parse_sgd(j.at("sgd")) : trainer::SgdConfig{};

    std::vector<trainer::Stage> stages;
    for (const auto& st : j.at("schedule")) {
        check_keys(st, "schedule[]", {"alpha", "delta", "delta_t", "iterations"});
        trainer::Stage stage;
        stage.alpha = st.at("alpha").get<double>();
        stage.delta = st.at("delta").get<double>();
        if (st.contains("delta_t")) stage.delta_t = st.at("delta_t").get<double>();
        stage.sgd = sgd_base;
        stage.sgd.iterations = st.at("iterations").get<int>();
        stages.push_back(stage);
    }

    ExperimentConfig cfg(Problem{std::move(domain), ham, bval, sup_pts, sup_vals, time_dependent,
                                 horizon, u0},
                         std::move(network), trainer::Schedule(std::move(stages), tau));
    cfg.weights = weights;
    cfg.sgd_base = sgd_base;
    cfg.ground_truth = truth;

    if (j.contains("sampling")) {
        const auto& sj = j.at("sampling");
        check_keys(sj, "sampling", {"interior", "boundary"});
        const std::string ik = get_or<std::string>(sj, "interior", "uniform");
        if (ik == "uniform") {
            cfg.sampling.interior_kind = geometry::SamplerKind::UniformInterior;
        } else if (ik == "radial") {
            cfg.sampling.interior_kind = geometry::SamplerKind::RadiallyUniform;
        } else {
            throw ConfigError("sampling: unknown interior sampler \"" + ik + "\"");
        }
        const std::string bk = get_or<std::string>(sj, "boundary", "uniform");
        if (bk != "uniform") throw ConfigError("sampling: boundary sampler must be uniform");
    }

    cfg.evaluation.n = get_or(ej, "n", 100000);
    cfg.evaluation.include_origin = get_or(ej, "include_origin", true);
    cfg.evaluation.seed = get_or<std::uint64_t>(ej, "seed", 1234);

    if (j.contains("oracle")) {
        const auto& oj = j.at("oracle");
        check_keys(oj, "oracle", {"d", "N", "alpha", "tau", "max_iters", "tol"});
        cfg.oracle.d = get_or(oj, "d", 1);
        cfg.oracle.N = get_or(oj, "N", 64);
        cfg.oracle.alpha = get_or(oj, "alpha", 1.0);
        cfg.oracle.tau = get_or(oj, "tau", 0.0);
        cfg.oracle.max_iters = get_or(oj, "max_iters", 400000);
        cfg.oracle.tol = get_or(oj, "tol", 1e-10);
    }

    if (j.contains("sweep")) {
        const auto& sj = j.at("sweep");
        check_keys(sj, "sweep",
                   {"alphas", "deltas", "iterations", "probes", "match_fraction",
                    "supervised_count"});
        if (sj.contains("alphas")) cfg.sweep.alphas = sj.at("alphas").get<std::vector<double>>();
        if (sj.contains("deltas")) cfg.sweep.deltas = sj.at("deltas").get<std::vector<double>>();
        cfg.sweep.iterations = get_or(sj, "iterations", 2000);
        cfg.sweep.probes = get_or(sj, "probes", 20000);
        cfg.sweep.match_fraction = get_or(sj, "match_fraction", 0.99);
        cfg.sweep.supervised_count = get_or(sj, "supervised_count", 0);
    }

    if (j.contains("rollout")) {
        const auto& rj = j.at("rollout");
        check_keys(rj, "rollout",
                   {"kind", "dt", "t_max", "target_radius", "capture_radius", "escape_radius",
                    "fd_delta"});
        cfg.rollout.kind = get_or<std::string>(rj, "kind", "car");
        if (cfg.rollout.kind != "car" && cfg.rollout.kind != "game") {
            throw ConfigError("rollout: kind must be car or game");
        }
        cfg.rollout.dt = get_or(rj, "dt", 0.01);
        cfg.rollout.t_max = get_or(rj, "t_max", 30.0);
        cfg.rollout.target_radius = get_or(rj, "target_radius", 0.2);
        cfg.rollout.capture_radius = get_or(rj, "capture_radius", 0.2);
        cfg.rollout.escape_radius = get_or(rj, "escape_radius", 4.0);
        if (rj.contains("fd_delta")) cfg.rollout.fd_delta = rj.at("fd_delta").get<double>();
    }
    // Rollout dynamics parameters come from the Hamiltonian itself.
    if (ham.kind() == Hamiltonian::Kind::ReedsShepp) {
        cfg.rollout.car = {ham.sigma(), ham.rho()};
    } else if (ham.kind() == Hamiltonian::Kind::PursuitEvasion) {
        cfg.rollout.evader = {ham.sigma_e(), ham.rho_e()};
        cfg.rollout.pursuer = {ham.sigma_p(), ham.rho_p()};
        cfg.rollout.kind = "game";
    }

    if (j.contains("seeds")) {
        cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        if (cfg.seeds.empty()) throw ConfigError("seeds: at least one seed required");
    }
    cfg.output_dir = get_or<std::string>(j, "output_dir", "out");

    // Resolved config for reproducibility headers.
    json r = j;
    r["problem"]["domain"] = domain_to_json(cfg.problem.domain);
    r["problem"]["hamiltonian"] = hamiltonian_to_json(ham);
    r["problem"]["boundary_values"] = resolved_bv;
    r["loss"] = {{"gamma1", weights.gamma1}, {"gamma2", weights.gamma2}, {"gamma0", weights.gamma0}};
    r["evaluation"] = {{"n", cfg.evaluation.n},
                       {"include_origin", cfg.evaluation.include_origin},
                       {"seed", cfg.evaluation.seed},
                       {"ground_truth", truth_kind}};
    r["seeds"] = cfg.seeds;
    r["output_dir"] = cfg.output_dir;
    cfg.resolved = std::move(r);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(is);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    try {
        return parse_config(j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    }
}

}  // namespace hj::cli
