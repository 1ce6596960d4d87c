#pragma once

#include <span>
#include <vector>

#include "hj/common.hpp"
#include "hj/hamiltonian.hpp"
#include "hj/network.hpp"
#include "hj/scheme.hpp"

namespace hj::loss {

struct LossWeights {
    double gamma1 = 0.0;  // boundary
    double gamma2 = 0.0;  // supervised
    double gamma0 = 0.0;  // initial condition
    void validate() const;
};

// One SGD mini-batch. For time-dependent problems every point carries t as its
// last coordinate (initial points have t = 0).
struct Batch {
    std::vector<Point> interior;
    std::vector<Point> boundary;
    std::vector<double> boundary_values;
    std::vector<Point> supervised;
    std::vector<double> supervised_values;
    std::vector<Point> initial;
    std::vector<double> initial_values;
};

struct LossParts {
    double residual = 0.0;
    double boundary = 0.0;
    double supervised = 0.0;
    double initial = 0.0;
    double total() const { return residual + boundary + supervised + initial; }
};

// (1/N0) sum r(x)^2 + (g1/Nb1) sum (Phi - g)^2 + (g2/Nb2) sum (Phi - h)^2
// with r the Lax-Friedrichs residual; all 2d+1 stencil evaluations per sample
// go through one batched forward pass.
LossParts loss_value(const Network& net, Span theta, const Hamiltonian& h,
                     const SchemeConfig& cfg, const LossWeights& w, const Batch& batch);

/// Exact gradient of loss_value with respect to theta (grad is overwritten).
LossParts loss_grad(const Network& net, Span theta, const Hamiltonian& h,
                    const SchemeConfig& cfg, const LossWeights& w, const Batch& batch,
                    std::span<double> grad);

// Time-dependent variants using the explicit Euler residual
//   u(x, t+dt) - u(x, t) + dt * Hhat_alpha(x, D+u(.,t), D-u(.,t))
// plus the gamma0 initial term and optional gamma1 boundary term.
LossParts loss_value_time(const Network& net, Span theta, const Hamiltonian& h,
                          const SchemeConfig& cfg, const LossWeights& w, const Batch& batch);

LossParts loss_grad_time(const Network& net, Span theta, const Hamiltonian& h,
                         const SchemeConfig& cfg, const LossWeights& w, const Batch& batch,
                         std::span<double> grad);

}  // namespace hj::loss
