#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hj/common.hpp"
#include "hj/geometry.hpp"
#include "hj/hamiltonian.hpp"
#include "hj/scheme.hpp"

namespace hj::evaluate {

using Evaluator = std::function<double(Span)>;

struct MetricReport {
    double mse = 0.0;
    double linf = 0.0;
    int n_samples = 0;
    bool include_origin = false;
    std::uint64_t seed = 0;
};

// Monte-Carlo MSE and L-inf error over uniform interior samples. The origin is
// appended to the L-inf scan when include_origin is set and the domain
// contains it (never for an annulus). For time-dependent problems pass
// time_horizon > 0; samples become (x, t) with t uniform on (0, T).
MetricReport mse_linf(const Evaluator& approx, const Evaluator& truth,
                      const geometry::Domain& domain, int n, bool include_origin,
                      std::uint64_t seed, double time_horizon = 0.0);

struct SuccessCriterion {
    Evaluator truth;
    int n_probes = 10000;
    double match_fraction = 0.99;  // sign agreement threshold for one run
    std::uint64_t seed = 0;
};

struct SuccessRate {
    double rate = 0.0;
    double half_width = 0.0;  // 1.96 sqrt(p(1-p)/n_runs)
    int successes = 0;
    int runs = 0;
};

/// A run succeeds iff sign(Phi) matches sign(truth) on >= match_fraction of probes.
SuccessRate success_rate(const std::vector<Evaluator>& runs, const geometry::Domain& domain,
                         const SuccessCriterion& criterion);

struct CrossSection {
    int axis_u = 0;
    int axis_v = 1;
    Point fixed;  // one entry per domain coordinate; axis_u/axis_v entries ignored
};

struct ResidualField {
    std::vector<Point> points;
    std::vector<double> values;  // squared Lax-Friedrichs residual
    double mean = 0.0;
    double max = 0.0;
};

// Squared scheme residual on a uniform evaluation lattice (resolution nodes
// per axis inside the bounding box, filtered to the domain). Domains with more
// than two dimensions require a cross-section.
ResidualField residual_field(const Evaluator& u, const Hamiltonian& h, const SchemeConfig& cfg,
                             const geometry::Domain& domain, int resolution,
                             const std::optional<CrossSection>& section = std::nullopt);

}  // namespace hj::evaluate
