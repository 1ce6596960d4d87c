#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "hj/common.hpp"

namespace hj::geometry {

enum class DomainKind { Cube, Ball, Annulus, ProductWithTorus };

// Bounded domains the solver runs on. ProductWithTorus glues 2pi-periodic
// coordinates onto a non-periodic base (the periodic coordinates come last
// and are never tagged as boundary).
class Domain {
public:
    static Domain cube(Point center, double half_width);
    static Domain ball(Point center, double radius);
    static Domain annulus(Point center, double inner_radius, double outer_radius);
    static Domain product_with_torus(Domain base, int torus_dims);

    DomainKind kind() const { return kind_; }
    int dim() const { return dim_; }

    bool contains(Span x) const;
    bool on_boundary(Span x, double tol) const;

    const Point& center() const { return center_; }
    double half_width() const { return r1_; }
    double radius() const { return r1_; }
    double inner_radius() const { return r0_; }
    double outer_radius() const { return r1_; }
    const Domain& base() const { return *base_; }
    int torus_dims() const { return torus_dims_; }

    /// Axis-aligned bounding box; periodic coordinates span [0, 2pi).
    std::pair<Point, Point> bounding_box() const;

    /// Number of distinct boundary tags (cube: 2d faces; annulus: 2 shells).
    int boundary_tag_count() const;

private:
    Domain() = default;

    DomainKind kind_ = DomainKind::Cube;
    int dim_ = 0;
    Point center_;
    double r0_ = 0.0;  // annulus inner radius
    double r1_ = 0.0;  // half width / radius / outer radius
    std::shared_ptr<const Domain> base_;
    int torus_dims_ = 0;
};

enum class SamplerKind { UniformInterior, RadiallyUniform, UniformBoundary, GridNodes };

struct SamplerSpec {
    SamplerKind kind = SamplerKind::UniformInterior;
    std::uint64_t seed = 0;
    double grid_delta = 0.0;  // GridNodes spacing
    Point grid_shift;         // GridNodes lattice shift (defaults to 0)
};

struct BoundaryPoint {
    Point x;
    int tag;  // cube: face index 2*axis + (upper ? 1 : 0); annulus: 0 inner, 1 outer
};

/// n points inside the domain. Identical (spec, n) gives identical output.
std::vector<Point> sample_interior(const Domain& domain, const SamplerSpec& spec, int n);

/// n points on the boundary (up to 1e-12) with their shell/face tag.
std::vector<BoundaryPoint> sample_boundary(const Domain& domain, const SamplerSpec& spec, int n);

// Max over points of the distance to its nearest neighbour. A recommended
// lower bound for the stencil width delta so that neighbouring collocation
// samples couple through the finite differences. O(n^2).
double nearest_neighbor_delta(const std::vector<Point>& points);

/// Uniform direction on the unit sphere in d dimensions.
Point unit_sphere_sample(Rng& rng, int d);

}  // namespace hj::geometry
