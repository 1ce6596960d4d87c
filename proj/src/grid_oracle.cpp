#include "hj/grid_oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace hj::grid_oracle {

namespace {

std::size_t ipow(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

// Iterates multi-indices over {lo,...,hi}^d lexicographically.
bool advance(std::vector<int>& beta, int lo, int hi) {
    int axis = static_cast<int>(beta.size()) - 1;
    while (axis >= 0) {
        if (++beta[axis] <= hi) return true;
        beta[axis] = lo;
        --axis;
    }
    return false;
}

// Residual W_b and slope field at one interior node.
struct NodeStencil {
    double w;
    std::vector<double> grad_h;  // dH/dp at the centered slope
};

NodeStencil node_residual(const Hamiltonian& h, const SchemeConfig& cfg, const GridSpec& grid,
                          Span U, const std::vector<int>& beta, bool want_grad) {
    const int d = grid.d;
    const double delta = grid.delta();
    std::vector<double> pbar(d);
    double secdiff = 0.0;
    std::vector<int> nb = beta;
    const double u0 = U[grid.flat_index(beta)];
    for (int i = 0; i < d; ++i) {
        nb[i] = beta[i] + 1;
        const double up = U[grid.flat_index(nb)];
        nb[i] = beta[i] - 1;
        const double um = U[grid.flat_index(nb)];
        nb[i] = beta[i];
        pbar[i] = (up - um) / (2.0 * delta);
        secdiff += (up + um - 2.0 * u0) / (2.0 * delta);
    }
    const Point x = grid.node(beta);
    NodeStencil out;
    out.w = h.eval(x, pbar) - cfg.alpha * secdiff + cfg.tau * u0;
    if (want_grad) out.grad_h = h.grad_p(x, pbar);
    return out;
}

}  // namespace

void GridSpec::validate() const {
    if (d < 1) throw std::invalid_argument("grid: d >= 1 required");
    if (N < 2) throw std::invalid_argument("grid: N >= 2 required");
    if (interior_count() > 4096) {
        throw std::invalid_argument("grid: interior larger than the 4096-node oracle cap");
    }
}

std::size_t GridSpec::total_nodes() const { return ipow(static_cast<std::size_t>(N) + 1, d); }
std::size_t GridSpec::interior_count() const { return ipow(static_cast<std::size_t>(N) - 1, d); }

std::vector<int> GridSpec::multi_index(std::size_t flat) const {
    std::vector<int> beta(d);
    for (int i = d - 1; i >= 0; --i) {
        beta[i] = static_cast<int>(flat % (N + 1));
        flat /= (N + 1);
    }
    return beta;
}

std::size_t GridSpec::flat_index(const std::vector<int>& beta) const {
    std::size_t flat = 0;
    for (int i = 0; i < d; ++i) flat = flat * (N + 1) + beta[i];
    return flat;
}

std::size_t GridSpec::interior_flat(const std::vector<int>& beta) const {
    std::size_t flat = 0;
    for (int i = 0; i < d; ++i) flat = flat * (N - 1) + (beta[i] - 1);
    return flat;
}

Point GridSpec::node(const std::vector<int>& beta) const {
    Point x(d);
    for (int i = 0; i < d; ++i) x[i] = delta() * beta[i];
    return x;
}

double discrete_functional(const Hamiltonian& h, const SchemeConfig& cfg, const GridSpec& grid,
                           Span U) {
    grid.validate();
    if (U.size() != grid.total_nodes()) throw std::invalid_argument("F(U): shape mismatch");
    const double weight = std::pow(grid.delta(), grid.d);
    double acc = 0.0;
    std::vector<int> beta(grid.d, 1);
    do {
        const double w = node_residual(h, cfg, grid, U, beta, false).w;
        acc += w * w;
    } while (advance(beta, 1, grid.N - 1));
    return weight * acc;
}

namespace {

// Interior residual and slope fields, padded with zeros outside the interior.
struct Fields {
    std::vector<double> w;               // interior order
    std::vector<std::vector<double>> v;  // [i][interior]
};

Fields build_fields(const Hamiltonian& h, const SchemeConfig& cfg, const GridSpec& grid, Span U) {
    Fields f;
    f.w.assign(grid.interior_count(), 0.0);
    f.v.assign(grid.d, std::vector<double>(grid.interior_count(), 0.0));
    std::vector<int> beta(grid.d, 1);
    do {
        const auto ns = node_residual(h, cfg, grid, U, beta, true);
        const std::size_t k = grid.interior_flat(beta);
        f.w[k] = ns.w;
        for (int i = 0; i < grid.d; ++i) f.v[i][k] = ns.grad_h[i];
    } while (advance(beta, 1, grid.N - 1));
    return f;
}

bool in_interior(const std::vector<int>& beta, int N) {
    for (int b : beta) {
        if (b < 1 || b > N - 1) return false;
    }
    return true;
}

}  // namespace

std::vector<double> grad_discrete_functional(const Hamiltonian& h, const SchemeConfig& cfg,
                                             const GridSpec& grid, Span U) {
    grid.validate();
    if (U.size() != grid.total_nodes()) throw std::invalid_argument("grad F(U): shape mismatch");
    const Fields f = build_fields(h, cfg, grid, U);
    const double coeff = std::pow(grid.delta(), grid.d - 1);
    const double tau_coeff = 2.0 * std::pow(grid.delta(), grid.d) * cfg.tau;

    std::vector<double> grad(grid.interior_count(), 0.0);
    std::vector<int> beta(grid.d, 1);
    std::vector<int> nb(grid.d);
    do {
        const std::size_t k = grid.interior_flat(beta);
        double transport = 0.0;
        double diffusion = -2.0 * f.w[k] * grid.d;
        nb = beta;
        for (int i = 0; i < grid.d; ++i) {
            nb[i] = beta[i] + 1;
            if (in_interior(nb, grid.N)) {
                const std::size_t kp = grid.interior_flat(nb);
                transport += f.v[i][kp] * f.w[kp];
                diffusion += f.w[kp];
            }
            nb[i] = beta[i] - 1;
            if (in_interior(nb, grid.N)) {
                const std::size_t km = grid.interior_flat(nb);
                transport -= f.v[i][km] * f.w[km];
                diffusion += f.w[km];
            }
            nb[i] = beta[i];
        }
        grad[k] = -coeff * (transport + cfg.alpha * diffusion) + tau_coeff * f.w[k];
    } while (advance(beta, 1, grid.N - 1));
    return grad;
}

AdjointSystem assemble_adjoint(const Hamiltonian& h, const SchemeConfig& cfg,
                               const GridSpec& grid, Span U) {
    grid.validate();
    if (U.size() != grid.total_nodes()) throw std::invalid_argument("adjoint: shape mismatch");
    const Eigen::Index n = static_cast<Eigen::Index>(grid.interior_count());
    AdjointSystem sys;
    Fields f = build_fields(h, cfg, grid, U);
    sys.w = std::move(f.w);
    sys.v = std::move(f.v);
    sys.a_n = Eigen::MatrixXd::Zero(n, n);
    sys.laplacian = Eigen::MatrixXd::Zero(n, n);

    std::vector<int> beta(grid.d, 1);
    std::vector<int> nb(grid.d);
    do {
        const Eigen::Index row = static_cast<Eigen::Index>(grid.interior_flat(beta));
        sys.laplacian(row, row) = -2.0 * grid.d;
        nb = beta;
        for (int i = 0; i < grid.d; ++i) {
            nb[i] = beta[i] + 1;
            if (in_interior(nb, grid.N)) {
                const Eigen::Index col = static_cast<Eigen::Index>(grid.interior_flat(nb));
                sys.a_n(row, col) += sys.v[i][col];
                sys.laplacian(row, col) += 1.0;
            }
            nb[i] = beta[i] - 1;
            if (in_interior(nb, grid.N)) {
                const Eigen::Index col = static_cast<Eigen::Index>(grid.interior_flat(nb));
                sys.a_n(row, col) -= sys.v[i][col];
                sys.laplacian(row, col) += 1.0;
            }
            nb[i] = beta[i];
        }
    } while (advance(beta, 1, grid.N - 1));

    sys.matrix = sys.a_n + cfg.alpha * sys.laplacian;
    if (cfg.tau > 0.0) {
        sys.matrix -= 2.0 * grid.delta() * cfg.tau * Eigen::MatrixXd::Identity(n, n);
    }
    return sys;
}

double smallest_laplacian_eigenvalue(const GridSpec& grid) {
    const double s = std::sin(0.5 * M_PI * grid.delta());
    return 4.0 * grid.d * s * s;
}

double grid_lipschitz(const GridSpec& grid, Span U) {
    if (U.size() != grid.total_nodes()) throw std::invalid_argument("lipschitz: shape mismatch");
    double lip = 0.0;
    std::vector<int> beta(grid.d, 0);
    std::vector<int> nb(grid.d);
    do {
        nb = beta;
        for (int i = 0; i < grid.d; ++i) {
            if (beta[i] + 1 > grid.N) continue;
            nb[i] = beta[i] + 1;
            lip = std::max(lip, std::abs(U[grid.flat_index(nb)] - U[grid.flat_index(beta)]));
            nb[i] = beta[i];
        }
    } while (advance(beta, 0, grid.N));
    return lip / grid.delta();
}

namespace {

GridFunction with_boundary(const GridSpec& grid, const BoundaryData& g) {
    GridFunction u{grid, std::vector<double>(grid.total_nodes(), 0.0)};
    std::vector<int> beta(grid.d, 0);
    do {
        if (!in_interior(beta, grid.N)) u.values[grid.flat_index(beta)] = g(grid.node(beta));
    } while (advance(beta, 0, grid.N));
    return u;
}

// One-sided-difference residual used by the relaxation solver (the training
// residual, as opposed to the centered form inside F).
double upwind_residual(const Hamiltonian& h, const SchemeConfig& cfg, const GridSpec& grid,
                       Span U, const std::vector<int>& beta) {
    const int d = grid.d;
    const double delta = grid.delta();
    const double u0 = U[grid.flat_index(beta)];
    std::vector<double> pp(d), pm(d);
    std::vector<int> nb = beta;
    for (int i = 0; i < d; ++i) {
        nb[i] = beta[i] + 1;
        pp[i] = (U[grid.flat_index(nb)] - u0) / delta;
        nb[i] = beta[i] - 1;
        pm[i] = (u0 - U[grid.flat_index(nb)]) / delta;
        nb[i] = beta[i];
    }
    const Point x = grid.node(beta);
    return scheme::lax_friedrichs(h, cfg, x, pp, pm,
                                  cfg.tau > 0.0 ? std::optional<double>(u0) : std::nullopt);
}

}  // namespace

FixedPointResult solve_fd_fixed_point(const Hamiltonian& h, const SchemeConfig& cfg,
                                      const GridSpec& grid, const BoundaryData& g,
                                      double pseudo_step, int max_iters, double tol) {
    grid.validate();
    if (pseudo_step <= 0.0) throw std::invalid_argument("fixed point: pseudo_step must be > 0");
    FixedPointResult res;
    res.u = with_boundary(grid, g);
    std::vector<double> residual(grid.interior_count(), 0.0);

    for (int it = 0; it < max_iters; ++it) {
        double worst = 0.0;
        std::vector<int> beta(grid.d, 1);
        do {
            const double r = upwind_residual(h, cfg, grid, res.u.values, beta);
            residual[grid.interior_flat(beta)] = r;
            worst = std::max(worst, std::abs(r));
        } while (advance(beta, 1, grid.N - 1));
        res.residual_trace.push_back(worst);
        res.final_residual = worst;
        res.iterations = it + 1;
        if (worst < tol) {
            res.converged = true;
            return res;
        }
        beta.assign(grid.d, 1);
        do {
            res.u.values[grid.flat_index(beta)] -= pseudo_step * residual[grid.interior_flat(beta)];
        } while (advance(beta, 1, grid.N - 1));
    }
    return res;
}

MinimizeResult minimize_grid_functional(const Hamiltonian& h, const SchemeConfig& cfg,
                                        const GridSpec& grid, const BoundaryData& g,
                                        double descent_step, int max_iters, double tol,
                                        Span start_interior) {
    grid.validate();
    if (descent_step <= 0.0) throw std::invalid_argument("minimize: descent_step must be > 0");
    MinimizeResult res;
    res.u = with_boundary(grid, g);
    if (!start_interior.empty()) {
        if (start_interior.size() != grid.interior_count()) {
            throw std::invalid_argument("minimize: start size mismatch");
        }
        std::vector<int> beta(grid.d, 1);
        do {
            res.u.values[grid.flat_index(beta)] = start_interior[grid.interior_flat(beta)];
        } while (advance(beta, 1, grid.N - 1));
    }

    for (int it = 0; it < max_iters; ++it) {
        const auto grad = grad_discrete_functional(h, cfg, grid, res.u.values);
        double gnorm = 0.0;
        for (double v : grad) gnorm = std::max(gnorm, std::abs(v));
        res.grad_inf_norm = gnorm;
        res.iterations = it + 1;
        if (gnorm < tol) {
            res.converged = true;
            break;
        }
        std::vector<int> beta(grid.d, 1);
        do {
            res.u.values[grid.flat_index(beta)] -= descent_step * grad[grid.interior_flat(beta)];
        } while (advance(beta, 1, grid.N - 1));
    }

    double worst = 0.0;
    std::vector<int> beta(grid.d, 1);
    do {
        worst = std::max(worst, std::abs(node_residual(h, cfg, grid, res.u.values, beta, false).w));
    } while (advance(beta, 1, grid.N - 1));
    res.max_abs_residual = worst;
    return res;
}

Eigen::MatrixXd riccati_reference(Span a_diag, double t) {
    if (t < 0.0) throw std::invalid_argument("riccati: t >= 0 required");
    const int n = static_cast<int>(a_diag.size());
    for (double a : a_diag) {
        if (std::atan(a) - t <= -0.5 * M_PI + 1e-6) {
            throw std::domain_error("riccati: solution blows up before t");
        }
    }
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) e(i, i) = a_diag[i];
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    auto rhs = [&](const Eigen::MatrixXd& m) -> Eigen::MatrixXd { return -m * m - id; };

    const double h = 1e-4;
    double s = 0.0;
    while (s < t) {
        const double step = std::min(h, t - s);
        const Eigen::MatrixXd k1 = rhs(e);
        const Eigen::MatrixXd k2 = rhs(e + 0.5 * step * k1);
        const Eigen::MatrixXd k3 = rhs(e + 0.5 * step * k2);
        const Eigen::MatrixXd k4 = rhs(e + step * k3);
        e += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        s += step;
    }
    return e;
}

double cube_distance_truth(Span x, Span center, double half_width) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - center[i]));
    return half_width - m;
}

double ball_distance_truth(Span x, Span center, double radius) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - center[i];
        s += d * d;
    }
    return radius - std::sqrt(s);
}

double annulus_distance_truth(Span x, Span center, double inner_radius, double outer_radius) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - center[i];
        s += d * d;
    }
    const double r = std::sqrt(s);
    return std::min(r - inner_radius, outer_radius - r);
}

double riccati_truth(Span x, double t, Span a_diag) {
    double quad = 0.0;
    for (std::size_t i = 0; i < a_diag.size(); ++i) {
        quad += std::tan(std::atan(a_diag[i]) - t) * x[i] * x[i];
    }
    return 0.5 * (quad - 1.0);
}

std::function<double(Span)> distance_ground_truth(const geometry::Domain& domain) {
    using geometry::DomainKind;
    switch (domain.kind()) {
        case DomainKind::Cube: {
            const Point c = domain.center();
            const double hw = domain.half_width();
            return [c, hw](Span x) { return cube_distance_truth(x, c, hw); };
        }
        case DomainKind::Ball: {
            const Point c = domain.center();
            const double r = domain.radius();
            return [c, r](Span x) { return ball_distance_truth(x, c, r); };
        }
        case DomainKind::Annulus: {
            const Point c = domain.center();
            const double r0 = domain.inner_radius();
            const double r1 = domain.outer_radius();
            return [c, r0, r1](Span x) { return annulus_distance_truth(x, c, r0, r1); };
        }
        default:
            throw std::invalid_argument("no closed-form distance truth for this domain");
    }
}

}  // namespace hj::grid_oracle
