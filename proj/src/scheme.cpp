#include "hj/scheme.hpp"

#include <cmath>
#include <stdexcept>

#include "hj/geometry.hpp"

namespace hj {

void SchemeConfig::validate() const {
    if (alpha <= 0.0) throw std::invalid_argument("scheme: alpha must be > 0");
    if (delta <= 0.0) throw std::invalid_argument("scheme: delta must be > 0");
    if (tau < 0.0) throw std::invalid_argument("scheme: tau must be >= 0");
    if (delta_t.has_value() && *delta_t <= 0.0) {
        throw std::invalid_argument("scheme: delta_t must be > 0 when present");
    }
}

namespace scheme {

std::vector<double> d_plus(const Field& u, Span x, double delta) {
    if (delta <= 0.0) throw std::invalid_argument("d_plus: delta must be > 0");
    const double ux = u(x);
    Point y(x.begin(), x.end());
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = x[i] + delta;
        g[i] = (u(y) - ux) / delta;
        y[i] = x[i];
    }
    return g;
}

std::vector<double> d_minus(const Field& u, Span x, double delta) {
    if (delta <= 0.0) throw std::invalid_argument("d_minus: delta must be > 0");
    const double ux = u(x);
    Point y(x.begin(), x.end());
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = x[i] - delta;
        g[i] = (ux - u(y)) / delta;
        y[i] = x[i];
    }
    return g;
}

double lax_friedrichs(const Hamiltonian& h, const SchemeConfig& cfg, Span x,
                      Span p_plus, Span p_minus, std::optional<double> u_x) {
    if (p_plus.size() != p_minus.size() || p_plus.size() != x.size()) {
        throw std::invalid_argument("lax_friedrichs: dimension mismatch");
    }
    if (cfg.tau > 0.0 && !u_x.has_value()) {
        throw std::invalid_argument("lax_friedrichs: u(x) required when tau > 0");
    }
    Point avg(x.size());
    double diff = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        avg[i] = 0.5 * (p_plus[i] + p_minus[i]);
        diff += 0.5 * (p_plus[i] - p_minus[i]);
    }
    double v = h.eval(x, avg) - cfg.alpha * diff;
    if (cfg.tau > 0.0) v += cfg.tau * *u_x;
    return v;
}

double residual(const Hamiltonian& h, const SchemeConfig& cfg, const Field& u, Span x) {
    const auto pp = d_plus(u, x, cfg.delta);
    const auto pm = d_minus(u, x, cfg.delta);
    std::optional<double> ux;
    if (cfg.tau > 0.0) ux = u(x);
    return lax_friedrichs(h, cfg, x, pp, pm, ux);
}

double residual_time(const Hamiltonian& h, const SchemeConfig& cfg, const TimeField& u,
                     Span x, double t) {
    if (!cfg.delta_t.has_value()) throw std::invalid_argument("residual_time: delta_t missing");
    const double dt = *cfg.delta_t;
    const Field slice = [&](Span y) { return u(y, t); };
    const auto pp = d_plus(slice, x, cfg.delta);
    const auto pm = d_minus(slice, x, cfg.delta);
    std::optional<double> ux;
    if (cfg.tau > 0.0) ux = u(x, t);
    return u(x, t + dt) - u(x, t) + dt * lax_friedrichs(h, cfg, x, pp, pm, ux);
}

bool check_consistency(const Hamiltonian& h, const SchemeConfig& cfg, int dim,
                       int n_probes, std::uint64_t seed) {
    const int req = h.required_dim();
    if (req != 0) dim = req;
    Rng rng(seed);
    Point x(dim), p(dim);
    for (int k = 0; k < n_probes; ++k) {
        for (int i = 0; i < dim; ++i) {
            x[i] = rng.uniform(-3.0, 3.0);
            p[i] = rng.uniform(-2.0, 2.0);
        }
        const double ux = rng.uniform(-1.0, 1.0);
        std::optional<double> opt_ux;
        if (cfg.tau > 0.0) opt_ux = ux;
        const double scheme_val = lax_friedrichs(h, cfg, x, p, p, opt_ux);
        if (std::abs(scheme_val - h.eval(x, p)) > 1e-12) return false;
    }
    return true;
}

namespace {

// Stencil tuple (u0, u+, u-) evaluated through the scheme.
double stencil_value(const Hamiltonian& h, const SchemeConfig& cfg, Span x, double u0,
                     Span up, Span um, double delta) {
    const std::size_t d = x.size();
    Point pp(d), pm(d);
    for (std::size_t i = 0; i < d; ++i) {
        pp[i] = (up[i] - u0) / delta;
        pm[i] = (u0 - um[i]) / delta;
    }
    return lax_friedrichs(h, cfg, x, pp, pm, cfg.tau > 0.0 ? std::optional<double>(u0) : std::nullopt);
}

// Kink guard: skip probes whose |.|-arguments sit within margin of zero, where
// finite perturbations straddle a derivative jump.
bool near_kink(const Hamiltonian& h, Span x, Span pbar, double margin) {
    switch (h.kind()) {
        case Hamiltonian::Kind::EikonalNorm:
            return norm2(pbar) < margin;
        case Hamiltonian::Kind::ReedsShepp: {
            const double w = x[2];
            return std::abs(pbar[0] * std::cos(w) + pbar[1] * std::sin(w)) < margin ||
                   std::abs(pbar[2]) < margin;
        }
        case Hamiltonian::Kind::PursuitEvasion: {
            const double we = x[2], wp = x[3];
            return std::abs(pbar[0] * std::cos(we) + pbar[1] * std::sin(we)) < margin ||
                   std::abs(pbar[0] * std::cos(wp) + pbar[1] * std::sin(wp)) < margin ||
                   std::abs(pbar[2]) < margin || std::abs(pbar[3]) < margin;
        }
        default:
            return false;
    }
}

}  // namespace

bool check_monotonicity(const Hamiltonian& h, const SchemeConfig& cfg, double L,
                        int dim, int n_probes, std::uint64_t seed) {
    const int req = h.required_dim();
    if (req != 0) dim = req;
    Rng rng(seed);
    const double delta = cfg.delta;
    const double eps = 1e-6 * delta;
    // Perturbing a neighbour by eps moves the centered slope by eps/(2 delta);
    // curvature of H can add up to that squared, so allow second-order slack.
    const double slack = 1e-12;

    Point x(dim), pbar(dim), up(dim), um(dim);
    int done = 0;
    while (done < n_probes) {
        for (int i = 0; i < dim; ++i) x[i] = rng.uniform(-3.0, 3.0);
        // Draw the centered slope inside the L-ball, second differences free.
        double r = std::pow(rng.uniform(), 1.0 / dim) * L;
        Point v = geometry::unit_sphere_sample(rng, dim);
        for (int i = 0; i < dim; ++i) pbar[i] = r * v[i];
        if (near_kink(h, x, pbar, 1e-8)) continue;
        const double u0 = rng.uniform(-1.0, 1.0);
        for (int i = 0; i < dim; ++i) {
            const double c = rng.uniform(-L, L);
            up[i] = u0 + delta * (pbar[i] + c);
            um[i] = u0 - delta * (pbar[i] - c);
        }
        const double base = stencil_value(h, cfg, x, u0, up, um, delta);

        // Non-decreasing in the center value.
        if (stencil_value(h, cfg, x, u0 + eps, up, um, delta) < base - slack) return false;
        // Non-increasing in each neighbour value.
        for (int i = 0; i < dim; ++i) {
            const double saved_p = up[i];
            up[i] += eps;
            const bool bad_p = stencil_value(h, cfg, x, u0, up, um, delta) > base + slack;
            up[i] = saved_p;
            if (bad_p) return false;
            const double saved_m = um[i];
            um[i] += eps;
            const bool bad_m = stencil_value(h, cfg, x, u0, up, um, delta) > base + slack;
            um[i] = saved_m;
            if (bad_m) return false;
        }
        ++done;
    }
    return true;
}

UniquenessCondition uniqueness_condition(const Hamiltonian& h, const SchemeConfig& cfg,
                                         double L, int dim) {
    const double s = std::sin(0.5 * M_PI * cfg.delta);
    const double lhs = 2.0 * cfg.alpha * s * s + cfg.tau / dim;
    const double margin = lhs - h.ch_bound(L);
    return {margin > 0.0, margin};
}

}  // namespace scheme
}  // namespace hj
