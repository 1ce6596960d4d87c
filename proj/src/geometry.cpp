#include "hj/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hj::geometry {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double dist_to_center(Span x, const Point& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double d = x[i] - c[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double inf_dist_to_center(Span x, const Point& c) {
    double m = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) m = std::max(m, std::abs(x[i] - c[i]));
    return m;
}

}  // namespace

Domain Domain::cube(Point center, double half_width) {
    if (center.empty()) throw std::invalid_argument("cube: empty center");
    if (half_width <= 0.0) throw std::invalid_argument("cube: half_width must be > 0");
    Domain d;
    d.kind_ = DomainKind::Cube;
    d.dim_ = static_cast<int>(center.size());
    d.center_ = std::move(center);
    d.r1_ = half_width;
    return d;
}

Domain Domain::ball(Point center, double radius) {
    if (center.empty()) throw std::invalid_argument("ball: empty center");
    if (radius <= 0.0) throw std::invalid_argument("ball: radius must be > 0");
    Domain d;
    d.kind_ = DomainKind::Ball;
    d.dim_ = static_cast<int>(center.size());
    d.center_ = std::move(center);
    d.r1_ = radius;
    return d;
}

Domain Domain::annulus(Point center, double inner_radius, double outer_radius) {
    if (center.empty()) throw std::invalid_argument("annulus: empty center");
    if (!(0.0 < inner_radius && inner_radius < outer_radius)) {
        throw std::invalid_argument("annulus: requires 0 < r < R");
    }
    Domain d;
    d.kind_ = DomainKind::Annulus;
    d.dim_ = static_cast<int>(center.size());
    d.center_ = std::move(center);
    d.r0_ = inner_radius;
    d.r1_ = outer_radius;
    return d;
}

Domain Domain::product_with_torus(Domain base, int torus_dims) {
    if (base.kind() == DomainKind::ProductWithTorus) {
        throw std::invalid_argument("product_with_torus: base must be non-periodic");
    }
    if (torus_dims < 1) throw std::invalid_argument("product_with_torus: torus_dims >= 1");
    Domain d;
    d.kind_ = DomainKind::ProductWithTorus;
    d.dim_ = base.dim() + torus_dims;
    d.torus_dims_ = torus_dims;
    d.base_ = std::make_shared<Domain>(std::move(base));
    return d;
}

bool Domain::contains(Span x) const {
    if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("contains: dimension mismatch");
    switch (kind_) {
        case DomainKind::Cube:
            return inf_dist_to_center(x, center_) < r1_;
        case DomainKind::Ball:
            return dist_to_center(x, center_) < r1_;
        case DomainKind::Annulus: {
            const double r = dist_to_center(x, center_);
            return r0_ < r && r < r1_;
        }
        case DomainKind::ProductWithTorus:
            return base_->contains(x.subspan(0, base_->dim()));
    }
    return false;
}

bool Domain::on_boundary(Span x, double tol) const {
    if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("on_boundary: dimension mismatch");
    switch (kind_) {
        case DomainKind::Cube: {
            const double m = inf_dist_to_center(x, center_);
            return std::abs(m - r1_) <= tol;
        }
        case DomainKind::Ball:
            return std::abs(dist_to_center(x, center_) - r1_) <= tol;
        case DomainKind::Annulus: {
            const double r = dist_to_center(x, center_);
            return std::abs(r - r0_) <= tol || std::abs(r - r1_) <= tol;
        }
        case DomainKind::ProductWithTorus:
            return base_->on_boundary(x.subspan(0, base_->dim()), tol);
    }
    return false;
}

std::pair<Point, Point> Domain::bounding_box() const {
    Point lo(dim_), hi(dim_);
    switch (kind_) {
        case DomainKind::Cube:
        case DomainKind::Ball:
            for (int i = 0; i < dim_; ++i) {
                lo[i] = center_[i] - r1_;
                hi[i] = center_[i] + r1_;
            }
            break;
        case DomainKind::Annulus:
            for (int i = 0; i < dim_; ++i) {
                lo[i] = center_[i] - r1_;
                hi[i] = center_[i] + r1_;
            }
            break;
        case DomainKind::ProductWithTorus: {
            auto [blo, bhi] = base_->bounding_box();
            for (int i = 0; i < base_->dim(); ++i) {
                lo[i] = blo[i];
                hi[i] = bhi[i];
            }
            for (int i = base_->dim(); i < dim_; ++i) {
                lo[i] = 0.0;
                hi[i] = kTwoPi;
            }
            break;
        }
    }
    return {lo, hi};
}

int Domain::boundary_tag_count() const {
    switch (kind_) {
        case DomainKind::Cube: return 2 * dim_;
        case DomainKind::Ball: return 1;
        case DomainKind::Annulus: return 2;
        case DomainKind::ProductWithTorus: return base_->boundary_tag_count();
    }
    return 0;
}

Point unit_sphere_sample(Rng& rng, int d) {
    Point v(d);
    double n = 0.0;
    do {
        for (int i = 0; i < d; ++i) v[i] = rng.normal();
        n = norm2(v);
    } while (n == 0.0);
    for (int i = 0; i < d; ++i) v[i] /= n;
    return v;
}

namespace {

Point sample_cube_interior(Rng& rng, const Domain& d) {
    Point x(d.dim());
    for (int i = 0; i < d.dim(); ++i) {
        x[i] = d.center()[i] + d.half_width() * (2.0 * rng.uniform() - 1.0);
    }
    return x;
}

// Lebesgue-uniform in a ball: uniform direction, radius R u^{1/d}.
Point sample_ball_interior(Rng& rng, const Domain& d) {
    Point v = unit_sphere_sample(rng, d.dim());
    const double r = d.radius() * std::pow(rng.uniform(), 1.0 / d.dim());
    for (int i = 0; i < d.dim(); ++i) v[i] = d.center()[i] + r * v[i];
    return v;
}

// Rejection from the bounding ball; acceptance >= 1 - (r/R)^d.
Point sample_annulus_interior(Rng& rng, const Domain& d) {
    for (;;) {
        Point v = unit_sphere_sample(rng, d.dim());
        const double r = d.outer_radius() * std::pow(rng.uniform(), 1.0 / d.dim());
        if (r <= d.inner_radius() || r >= d.outer_radius()) continue;
        for (int i = 0; i < d.dim(); ++i) v[i] = d.center()[i] + r * v[i];
        return v;
    }
}

Point sample_radially_uniform(Rng& rng, const Domain& d) {
    double r_lo = 0.0, r_hi = 0.0;
    if (d.kind() == DomainKind::Ball) {
        r_hi = d.radius();
    } else {
        r_lo = d.inner_radius();
        r_hi = d.outer_radius();
    }
    Point v = unit_sphere_sample(rng, d.dim());
    double r = rng.uniform(r_lo, r_hi);
    while (r <= r_lo || r >= r_hi) r = rng.uniform(r_lo, r_hi);
    for (int i = 0; i < d.dim(); ++i) v[i] = d.center()[i] + r * v[i];
    return v;
}

bool radial_valid(const Domain& d) {
    if (d.kind() == DomainKind::Ball || d.kind() == DomainKind::Annulus) return true;
    if (d.kind() == DomainKind::ProductWithTorus) {
        const auto bk = d.base().kind();
        return bk == DomainKind::Ball || bk == DomainKind::Annulus;
    }
    return false;
}

std::vector<Point> grid_nodes(const Domain& domain, const SamplerSpec& spec, int n) {
    if (spec.grid_delta <= 0.0) throw std::invalid_argument("GridNodes: grid_delta must be > 0");
    const int d = domain.dim();
    Point shift = spec.grid_shift;
    if (shift.empty()) shift.assign(d, 0.0);
    if (static_cast<int>(shift.size()) != d) throw std::invalid_argument("GridNodes: shift dimension mismatch");
    auto [lo, hi] = domain.bounding_box();
    std::vector<long> k_lo(d), k_hi(d);
    for (int i = 0; i < d; ++i) {
        k_lo[i] = static_cast<long>(std::ceil((lo[i] - shift[i]) / spec.grid_delta));
        k_hi[i] = static_cast<long>(std::floor((hi[i] - shift[i]) / spec.grid_delta));
        if (k_hi[i] < k_lo[i]) return {};
    }
    std::vector<Point> out;
    std::vector<long> k = k_lo;
    Point x(d);
    for (;;) {
        for (int i = 0; i < d; ++i) x[i] = shift[i] + spec.grid_delta * static_cast<double>(k[i]);
        if (domain.contains(x) && static_cast<int>(out.size()) < n) out.push_back(x);
        if (static_cast<int>(out.size()) == n) break;
        int axis = d - 1;
        while (axis >= 0) {
            if (++k[axis] <= k_hi[axis]) break;
            k[axis] = k_lo[axis];
            --axis;
        }
        if (axis < 0) break;
    }
    return out;
}

}  // namespace

std::vector<Point> sample_interior(const Domain& domain, const SamplerSpec& spec, int n) {
    if (n < 1) throw std::invalid_argument("sample_interior: n >= 1 required");
    if (spec.kind == SamplerKind::UniformBoundary) {
        throw std::invalid_argument("sample_interior: boundary sampler requested");
    }
    if (spec.kind == SamplerKind::GridNodes) return grid_nodes(domain, spec, n);
    if (spec.kind == SamplerKind::RadiallyUniform && !radial_valid(domain)) {
        throw std::invalid_argument("RadiallyUniform is only valid for balls and annuli");
    }

    Rng rng(spec.seed);
    std::vector<Point> out;
    out.reserve(n);
    const bool product = domain.kind() == DomainKind::ProductWithTorus;
    const Domain& body = product ? domain.base() : domain;
    for (int i = 0; i < n; ++i) {
        Point x;
        if (spec.kind == SamplerKind::RadiallyUniform) {
            x = sample_radially_uniform(rng, body);
        } else {
            switch (body.kind()) {
                case DomainKind::Cube: x = sample_cube_interior(rng, body); break;
                case DomainKind::Ball: x = sample_ball_interior(rng, body); break;
                case DomainKind::Annulus: x = sample_annulus_interior(rng, body); break;
                default: throw std::logic_error("unexpected domain kind");
            }
        }
        if (product) {
            for (int j = 0; j < domain.torus_dims(); ++j) x.push_back(rng.uniform(0.0, kTwoPi));
        }
        out.push_back(std::move(x));
    }
    return out;
}

std::vector<BoundaryPoint> sample_boundary(const Domain& domain, const SamplerSpec& spec, int n) {
    if (n < 1) throw std::invalid_argument("sample_boundary: n >= 1 required");
    if (spec.kind != SamplerKind::UniformBoundary) {
        throw std::invalid_argument("sample_boundary: spec.kind must be UniformBoundary");
    }

    Rng rng(spec.seed);
    std::vector<BoundaryPoint> out;
    out.reserve(n);
    const bool product = domain.kind() == DomainKind::ProductWithTorus;
    const Domain& body = product ? domain.base() : domain;
    const int bd = body.dim();

    for (int i = 0; i < n; ++i) {
        Point x(bd);
        int tag = 0;
        switch (body.kind()) {
            case DomainKind::Cube: {
                // Face picked uniformly among the 2d faces, then uniform on it.
                const int face = static_cast<int>(rng.uniform() * 2 * bd) % (2 * bd);
                const int axis = face / 2;
                const double side = (face % 2 == 0) ? -1.0 : 1.0;
                for (int j = 0; j < bd; ++j) {
                    x[j] = body.center()[j] + body.half_width() * (2.0 * rng.uniform() - 1.0);
                }
                x[axis] = body.center()[axis] + side * body.half_width();
                tag = face;
                break;
            }
            case DomainKind::Ball: {
                Point v = unit_sphere_sample(rng, bd);
                for (int j = 0; j < bd; ++j) x[j] = body.center()[j] + body.radius() * v[j];
                tag = 0;
                break;
            }
            case DomainKind::Annulus: {
                // Paper is silent on the shell split; inner and outer get equal mass.
                const bool outer = rng.uniform() >= 0.5;
                const double r = outer ? body.outer_radius() : body.inner_radius();
                Point v = unit_sphere_sample(rng, bd);
                for (int j = 0; j < bd; ++j) x[j] = body.center()[j] + r * v[j];
                tag = outer ? 1 : 0;
                break;
            }
            default:
                throw std::logic_error("unexpected domain kind");
        }
        if (product) {
            for (int j = 0; j < domain.torus_dims(); ++j) x.push_back(rng.uniform(0.0, kTwoPi));
        }
        out.push_back({std::move(x), tag});
    }
    return out;
}

double nearest_neighbor_delta(const std::vector<Point>& points) {
    if (points.size() < 2) throw std::invalid_argument("nearest_neighbor_delta: need >= 2 points");
    double worst = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (i == j) continue;
            double s = 0.0;
            for (std::size_t k = 0; k < points[i].size(); ++k) {
                const double d = points[i][k] - points[j][k];
                s += d * d;
            }
            best = std::min(best, s);
        }
        worst = std::max(worst, best);
    }
    return std::sqrt(worst);
}

}  // namespace hj::geometry
