#include "hj/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace hj::loss {

void LossWeights::validate() const {
    if (!(gamma1 >= 0.0) || !(gamma2 >= 0.0) || !(gamma0 >= 0.0)) {
        throw std::invalid_argument("loss weights must be finite and non-negative");
    }
}

namespace {

void check_pairs(const std::vector<Point>& pts, const std::vector<double>& vals, const char* what) {
    if (pts.size() != vals.size()) {
        throw std::invalid_argument(std::string(what) + ": point/value size mismatch");
    }
    for (double v : vals) {
        if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite value");
    }
}

// Shared implementation. Builds the full evaluation point list (interior
// stencils + data points), runs one forward pass, and, when grad != nullptr,
// a single ordered gradient accumulation with per-point adjoint weights.
LossParts eval_loss(const Network& net, Span theta, const Hamiltonian& h,
                    const SchemeConfig& cfg, const LossWeights& w, const Batch& batch,
                    bool time_mode, std::span<double>* grad) {
    w.validate();
    cfg.validate();
    if (batch.interior.empty()) throw std::invalid_argument("loss: empty interior batch");
    check_pairs(batch.boundary, batch.boundary_values, "boundary");
    check_pairs(batch.supervised, batch.supervised_values, "supervised");
    check_pairs(batch.initial, batch.initial_values, "initial");
    if (time_mode && !cfg.delta_t.has_value()) {
        throw std::invalid_argument("loss: delta_t required in time mode");
    }

    const int in_dim = net.input_dim();
    const int d = time_mode ? in_dim - 1 : in_dim;  // spatial dimension
    const double delta = cfg.delta;
    const double dt = time_mode ? *cfg.delta_t : 0.0;
    const std::size_t stencil = time_mode ? 2 * d + 2 : 2 * d + 1;
    const std::size_t n0 = batch.interior.size();

    std::vector<Point> pts;
    pts.reserve(n0 * stencil + batch.boundary.size() + batch.supervised.size() +
                batch.initial.size());
    for (const Point& x : batch.interior) {
        if (static_cast<int>(x.size()) != in_dim) {
            throw std::invalid_argument("loss: interior point dimension mismatch");
        }
        pts.push_back(x);
        for (int i = 0; i < d; ++i) {
            Point xp = x;
            xp[i] += delta;
            pts.push_back(std::move(xp));
        }
        for (int i = 0; i < d; ++i) {
            Point xm = x;
            xm[i] -= delta;
            pts.push_back(std::move(xm));
        }
        if (time_mode) {
            Point xt = x;
            xt[d] += dt;
            pts.push_back(std::move(xt));
        }
    }
    const std::size_t boundary_begin = pts.size();
    pts.insert(pts.end(), batch.boundary.begin(), batch.boundary.end());
    const std::size_t supervised_begin = pts.size();
    pts.insert(pts.end(), batch.supervised.begin(), batch.supervised.end());
    const std::size_t initial_begin = pts.size();
    pts.insert(pts.end(), batch.initial.begin(), batch.initial.end());

    std::vector<double> values;
    net.forward_batch(theta, pts, values);

    std::vector<double> upstream;
    if (grad != nullptr) upstream.assign(pts.size(), 0.0);

    LossParts parts;
    std::vector<double> pbar(d), q(d);
    for (std::size_t j = 0; j < n0; ++j) {
        const std::size_t base = j * stencil;
        const double v0 = values[base];
        double secdiff = 0.0;
        for (int i = 0; i < d; ++i) {
            const double vp = values[base + 1 + i];
            const double vm = values[base + 1 + d + i];
            pbar[i] = (vp - vm) / (2.0 * delta);
            secdiff += (vp + vm - 2.0 * v0) / (2.0 * delta);
        }
        const Span x_spatial(batch.interior[j].data(), d);
        const double scheme_val = h.eval(x_spatial, pbar) - cfg.alpha * secdiff + cfg.tau * v0;
        const double r = time_mode ? values[base + stencil - 1] - v0 + dt * scheme_val
                                   : scheme_val;
        parts.residual += r * r;
        if (grad != nullptr) {
            h.grad_p(x_spatial, pbar, q);
            const double c = 2.0 * r / static_cast<double>(n0);
            const double scale = time_mode ? dt : 1.0;
            for (int i = 0; i < d; ++i) {
                upstream[base + 1 + i] += c * scale * (q[i] - cfg.alpha) / (2.0 * delta);
                upstream[base + 1 + d + i] += c * scale * (-q[i] - cfg.alpha) / (2.0 * delta);
            }
            const double center = scale * (cfg.alpha * d / delta + cfg.tau);
            upstream[base] += c * (time_mode ? center - 1.0 : center);
            if (time_mode) upstream[base + stencil - 1] += c;
        }
    }
    parts.residual /= static_cast<double>(n0);

    auto data_term = [&](std::size_t begin, const std::vector<Point>& xs,
                         const std::vector<double>& targets, double gamma) {
        if (xs.empty() || gamma == 0.0) return 0.0;
        double acc = 0.0;
        const double inv_n = 1.0 / static_cast<double>(xs.size());
        for (std::size_t j = 0; j < xs.size(); ++j) {
            const double misfit = values[begin + j] - targets[j];
            acc += misfit * misfit;
            if (grad != nullptr) {
                upstream[begin + j] += 2.0 * gamma * inv_n * misfit;
            }
        }
        return gamma * inv_n * acc;
    };
    parts.boundary = data_term(boundary_begin, batch.boundary, batch.boundary_values, w.gamma1);
    parts.supervised = data_term(supervised_begin, batch.supervised, batch.supervised_values, w.gamma2);
    parts.initial = data_term(initial_begin, batch.initial, batch.initial_values, w.gamma0);

    if (grad != nullptr) {
        std::fill(grad->begin(), grad->end(), 0.0);
        net.accumulate_grad(theta, pts, upstream, *grad);
    }
    return parts;
}

}  // namespace

LossParts loss_value(const Network& net, Span theta, const Hamiltonian& h,
                     const SchemeConfig& cfg, const LossWeights& w, const Batch& batch) {
    return eval_loss(net, theta, h, cfg, w, batch, false, nullptr);
}

LossParts loss_grad(const Network& net, Span theta, const Hamiltonian& h,
                    const SchemeConfig& cfg, const LossWeights& w, const Batch& batch,
                    std::span<double> grad) {
    return eval_loss(net, theta, h, cfg, w, batch, false, &grad);
}

LossParts loss_value_time(const Network& net, Span theta, const Hamiltonian& h,
                          const SchemeConfig& cfg, const LossWeights& w, const Batch& batch) {
    return eval_loss(net, theta, h, cfg, w, batch, true, nullptr);
}

LossParts loss_grad_time(const Network& net, Span theta, const Hamiltonian& h,
                         const SchemeConfig& cfg, const LossWeights& w, const Batch& batch,
                         std::span<double> grad) {
    return eval_loss(net, theta, h, cfg, w, batch, true, &grad);
}

}  // namespace hj::loss
