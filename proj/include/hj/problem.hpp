#pragma once

#include <functional>
#include <vector>

#include "hj/common.hpp"
#include "hj/geometry.hpp"
#include "hj/hamiltonian.hpp"

namespace hj {

// A boundary/initial value problem instance. For time-dependent problems the
// network input is (x, t) with t appended as the last coordinate.
struct Problem {
    geometry::Domain domain;
    Hamiltonian hamiltonian;

    /// Dirichlet data g(x) keyed by boundary tag (annulus shells, cube faces).
    std::function<double(Span, int)> boundary_value;

    // Optional supervised set (Gamma, h): fixed interior points with known values.
    std::vector<Point> supervised_points;
    std::vector<double> supervised_values;

    // Time-dependent pieces.
    bool time_dependent = false;
    double horizon = 0.0;                       // T
    std::function<double(Span)> initial_value;  // u0(x)
};

}  // namespace hj
