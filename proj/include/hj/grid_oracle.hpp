#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "hj/common.hpp"
#include "hj/geometry.hpp"
#include "hj/hamiltonian.hpp"
#include "hj/scheme.hpp"

namespace hj::grid_oracle {

// Uniform grid on the unit cube [0,1]^d with delta = 1/N. Interior nodes are
// the multi-indices in {1,...,N-1}^d, closed grid {0,...,N}^d, both ordered
// lexicographically. Desk-scale only: dense operators, (N-1)^d <= 4096.
struct GridSpec {
    int d = 1;
    int N = 2;

    void validate() const;
    double delta() const { return 1.0 / N; }
    std::size_t total_nodes() const;
    std::size_t interior_count() const;

    std::vector<int> multi_index(std::size_t flat) const;  // over the closed grid
    std::size_t flat_index(const std::vector<int>& beta) const;
    std::size_t interior_flat(const std::vector<int>& beta) const;
    Point node(const std::vector<int>& beta) const;
};

struct GridFunction {
    GridSpec spec;
    std::vector<double> values;  // (N+1)^d, closed-grid lexicographic order

    double& at(const std::vector<int>& beta) { return values[spec.flat_index(beta)]; }
    double at(const std::vector<int>& beta) const { return values[spec.flat_index(beta)]; }
};

// F(U) = delta^d sum_{interior} [H(x_b, D U_b) - alpha sum_i D2_i U_b + tau U_b]^2
// with the centered gradient D U_b = (U_{b+e_i} - U_{b-e_i})/(2 delta) and the
// second difference D2_i U_b = (U_{b+e_i} + U_{b-e_i} - 2 U_b)/(2 delta).
// Note the 2*delta denominator in D2: the Lax-Friedrichs algebra depends on it
// (it is not the textbook delta^2 Laplacian stencil).
double discrete_functional(const Hamiltonian& h, const SchemeConfig& cfg, const GridSpec& grid,
                           Span U);

// Closed-form gradient of F with respect to the interior values:
//   dF/dU_b = -delta^{d-1} ( sum_i (V^i_{b+e_i} W_{b+e_i} - V^i_{b-e_i} W_{b-e_i})
//                          + alpha sum_i (W_{b+e_i} + W_{b-e_i} - 2 W_b) )
//           + 2 delta^d tau W_b,
// with W the residual grid function and V^i = dH/dp_i, both zero outside the
// interior.
std::vector<double> grad_discrete_functional(const Hamiltonian& h, const SchemeConfig& cfg,
                                             const GridSpec& grid, Span U);

// The adjoint operator split: matrix = A_N(V) + alpha Delta_N - 2 delta tau I,
// acting on interior grid functions, so that
//   grad F(U) = -delta^{d-1} * matrix * w    (exactly, to rounding).
struct AdjointSystem {
    std::vector<double> w;                // residuals, interior order
    std::vector<std::vector<double>> v;   // d slope fields V^(i), interior order
    Eigen::MatrixXd a_n;                  // A_N(V)
    Eigen::MatrixXd laplacian;            // Delta_N (negative definite)
    Eigen::MatrixXd matrix;               // A_N(V) + alpha Delta_N (- 2 delta tau I)
};

AdjointSystem assemble_adjoint(const Hamiltonian& h, const SchemeConfig& cfg,
                               const GridSpec& grid, Span U);

/// Smallest eigenvalue of -Delta_N in closed form: 4 d sin^2(pi delta / 2).
double smallest_laplacian_eigenvalue(const GridSpec& grid);

/// Max absolute one-sided difference quotient; the grid Lipschitz estimate.
double grid_lipschitz(const GridSpec& grid, Span U);

using BoundaryData = std::function<double(Span)>;

struct FixedPointResult {
    GridFunction u;
    bool converged = false;
    int iterations = 0;
    double final_residual = 0.0;
    std::vector<double> residual_trace;  // max |residual| per sweep
};

// Monotone pseudo-time relaxation of the interior equation Hhat_alpha = 0 with
// the boundary pinned to g. Requires pseudo_step <= delta/(2 d alpha) for the
// update to stay monotone.
FixedPointResult solve_fd_fixed_point(const Hamiltonian& h, const SchemeConfig& cfg,
                                      const GridSpec& grid, const BoundaryData& g,
                                      double pseudo_step, int max_iters, double tol);

struct MinimizeResult {
    GridFunction u;
    bool converged = false;
    int iterations = 0;
    double max_abs_residual = 0.0;  // max |W| at the final iterate
    double grad_inf_norm = 0.0;
};

// Fixed-step gradient descent on F(U) over the interior values, boundary
// pinned to g. Stops when |grad F|_inf < tol.
MinimizeResult minimize_grid_functional(const Hamiltonian& h, const SchemeConfig& cfg,
                                        const GridSpec& grid, const BoundaryData& g,
                                        double descent_step, int max_iters, double tol,
                                        Span start_interior = {});

// Riccati matrix ODE dE/dt = -E^2 - I, E(0) = diag(a), integrated with
// classical RK4 at fixed step 1e-4. For diagonal A each entry has the closed
// form tan(atan(a) - t), which blows up when atan(a) - t reaches -pi/2.
Eigen::MatrixXd riccati_reference(Span a_diag, double t);

// Closed-form viscosity solutions used as ground truth.
double cube_distance_truth(Span x, Span center, double half_width);
double ball_distance_truth(Span x, Span center, double radius);
double annulus_distance_truth(Span x, Span center, double inner_radius, double outer_radius);
/// u(x, t) = (<x, E(t) x> - 1)/2 for diagonal E(t) = diag(tan(atan(a_i) - t)).
double riccati_truth(Span x, double t, Span a_diag);

/// Distance-to-boundary truth for the Eikonal problem on cube/ball/annulus.
std::function<double(Span)> distance_ground_truth(const geometry::Domain& domain);

}  // namespace hj::grid_oracle
