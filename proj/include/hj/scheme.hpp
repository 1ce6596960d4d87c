#pragma once

#include <functional>
#include <optional>

#include "hj/common.hpp"
#include "hj/hamiltonian.hpp"

namespace hj {

// Lax-Friedrichs discretization parameters. alpha is the numerical diffusion,
// delta the spatial step, tau an optional zeroth-order term, delta_t the time
// step of the explicit Euler scheme for time-dependent problems.
struct SchemeConfig {
    double alpha = 1.0;
    double delta = 0.1;
    double tau = 0.0;
    std::optional<double> delta_t;

    void validate() const;

    /// Explicit Euler + LxF update stays monotone for delta_t <= delta/(2 d alpha).
    bool time_step_stable(int dim) const {
        return !delta_t.has_value() || *delta_t <= delta / (2.0 * dim * alpha);
    }
};

namespace scheme {

using Field = std::function<double(Span)>;
using TimeField = std::function<double(Span, double)>;

/// Forward one-sided difference gradient, component i: (u(x+de_i) - u(x))/d.
std::vector<double> d_plus(const Field& u, Span x, double delta);
/// Backward one-sided difference gradient, component i: (u(x) - u(x-de_i))/d.
std::vector<double> d_minus(const Field& u, Span x, double delta);

// H(x, (p+ + p-)/2) - alpha * sum_i (p_i+ - p_i-)/2 + tau * u(x).
// u_x is required exactly when cfg.tau > 0.
double lax_friedrichs(const Hamiltonian& h, const SchemeConfig& cfg, Span x,
                      Span p_plus, Span p_minus,
                      std::optional<double> u_x = std::nullopt);

/// Composes d_plus/d_minus into the scheme value at x.
double residual(const Hamiltonian& h, const SchemeConfig& cfg, const Field& u, Span x);

/// u(x, t+dt) - u(x, t) + dt * Hhat_alpha(x, D+u(.,t), D-u(.,t)).
double residual_time(const Hamiltonian& h, const SchemeConfig& cfg, const TimeField& u,
                     Span x, double t);

/// True iff |Hhat(x,p,p) - H(x,p)| <= 1e-12 on all random probes.
bool check_consistency(const Hamiltonian& h, const SchemeConfig& cfg, int dim,
                       int n_probes, std::uint64_t seed = 0);

// Finite-perturbation monotonicity probe: the scheme value must be
// non-decreasing in u(x) and non-increasing in each neighbour value, over
// random stencils with centered slopes bounded by L. Guaranteed to hold when
// alpha >= ch_bound(h, L).
bool check_monotonicity(const Hamiltonian& h, const SchemeConfig& cfg, double L,
                        int dim, int n_probes, std::uint64_t seed = 0);

struct UniquenessCondition {
    bool satisfied;
    double margin;  // 2 alpha sin^2(pi delta / 2) + tau/d - C_H(L)
};

/// The critical-point condition: positive margin forces zero residuals at
/// critical points with Lipschitz constant <= L.
UniquenessCondition uniqueness_condition(const Hamiltonian& h, const SchemeConfig& cfg,
                                         double L, int dim);

}  // namespace scheme
}  // namespace hj
