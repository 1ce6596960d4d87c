#include "hj/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hj::evaluate {

MetricReport mse_linf(const Evaluator& approx, const Evaluator& truth,
                      const geometry::Domain& domain, int n, bool include_origin,
                      std::uint64_t seed, double time_horizon) {
    if (n < 1) throw std::invalid_argument("mse_linf: n >= 1 required");
    MetricReport rep;
    rep.n_samples = n;
    rep.seed = seed;

    geometry::SamplerSpec spec{geometry::SamplerKind::UniformInterior, seed, 0.0, {}};
    auto pts = geometry::sample_interior(domain, spec, n);
    if (time_horizon > 0.0) {
        Rng trng(derive_seed(seed, 0x7177ULL));
        for (auto& p : pts) p.push_back(trng.uniform(0.0, time_horizon));
    }

    // "Add the origin" sharpens the L-inf estimate where the error peaks;
    // it does not apply to annuli, whose hole excludes the origin.
    bool origin_used = false;
    if (include_origin && domain.kind() != geometry::DomainKind::Annulus) {
        Point origin(domain.dim(), 0.0);
        if (domain.contains(origin)) {
            if (time_horizon > 0.0) origin.push_back(0.0);
            pts.push_back(std::move(origin));
            origin_used = true;
        }
    }
    rep.include_origin = origin_used;

    double mse = 0.0, linf = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double err = std::abs(approx(pts[i]) - truth(pts[i]));
        linf = std::max(linf, err);
        const bool is_origin_extra = origin_used && i + 1 == pts.size();
        if (!is_origin_extra) mse += err * err;
    }
    rep.mse = mse / static_cast<double>(n);
    rep.linf = linf;
    return rep;
}

SuccessRate success_rate(const std::vector<Evaluator>& runs, const geometry::Domain& domain,
                         const SuccessCriterion& criterion) {
    if (runs.empty()) throw std::invalid_argument("success_rate: >= 1 run required");
    geometry::SamplerSpec spec{geometry::SamplerKind::UniformInterior, criterion.seed, 0.0, {}};
    const auto pts = geometry::sample_interior(domain, spec, criterion.n_probes);

    std::vector<double> truth_sign(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) truth_sign[i] = sgn(criterion.truth(pts[i]));

    SuccessRate out;
    out.runs = static_cast<int>(runs.size());
    for (const auto& run : runs) {
        int match = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (sgn(run(pts[i])) == truth_sign[i]) ++match;
        }
        if (match >= criterion.match_fraction * static_cast<double>(pts.size())) ++out.successes;
    }
    out.rate = static_cast<double>(out.successes) / out.runs;
    out.half_width = 1.96 * std::sqrt(out.rate * (1.0 - out.rate) / out.runs);
    return out;
}

ResidualField residual_field(const Evaluator& u, const Hamiltonian& h, const SchemeConfig& cfg,
                             const geometry::Domain& domain, int resolution,
                             const std::optional<CrossSection>& section) {
    if (resolution < 2) throw std::invalid_argument("residual_field: resolution >= 2 required");
    if (domain.dim() > 2 && !section.has_value()) {
        throw std::invalid_argument("residual_field: cross-section required for d > 2");
    }
    const auto [lo, hi] = domain.bounding_box();
    const int d = domain.dim();

    const int au = section ? section->axis_u : 0;
    const int av = section ? section->axis_v : (d > 1 ? 1 : 0);
    if (section && static_cast<int>(section->fixed.size()) != d) {
        throw std::invalid_argument("residual_field: fixed vector must have domain dimension");
    }

    ResidualField field;
    const auto eval_at = [&](Point x) {
        if (!domain.contains(x)) return;
        const double r = scheme::residual(h, cfg, u, x);
        field.points.push_back(std::move(x));
        field.values.push_back(r * r);
    };

    if (d == 1 && !section) {
        for (int i = 0; i < resolution; ++i) {
            Point x{lo[0] + (hi[0] - lo[0]) * i / (resolution - 1.0)};
            eval_at(std::move(x));
        }
    } else {
        for (int i = 0; i < resolution; ++i) {
            for (int j = 0; j < resolution; ++j) {
                Point x = section ? section->fixed : Point(d, 0.0);
                x[au] = lo[au] + (hi[au] - lo[au]) * i / (resolution - 1.0);
                x[av] = lo[av] + (hi[av] - lo[av]) * j / (resolution - 1.0);
                eval_at(std::move(x));
            }
        }
    }

    for (double v : field.values) {
        field.mean += v;
        field.max = std::max(field.max, v);
    }
    if (!field.values.empty()) field.mean /= static_cast<double>(field.values.size());
    return field;
}

}  // namespace hj::evaluate
