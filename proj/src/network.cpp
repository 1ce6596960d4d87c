#include "hj/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hj/kernels.hpp"

namespace hj {

void MlpArchitecture::validate() const {
    if (input_dim < 1) throw std::invalid_argument("mlp: input_dim >= 1 required");
    if (hidden.empty()) throw std::invalid_argument("mlp: at least one hidden layer required");
    for (int w : hidden) {
        if (w < 1) throw std::invalid_argument("mlp: layer widths must be >= 1");
    }
}

std::size_t MlpArchitecture::param_count() const {
    std::size_t n = 0;
    int fan_in = input_dim;
    for (int w : hidden) {
        n += static_cast<std::size_t>(fan_in) * w + w;
        fan_in = w;
    }
    n += static_cast<std::size_t>(fan_in) + 1;  // output row + bias
    return n;
}

std::vector<LayerView> layer_map(const MlpArchitecture& arch) {
    std::vector<LayerView> views;
    views.reserve(arch.layers());
    std::size_t off = 0;
    int fan_in = arch.input_dim;
    for (int i = 0; i < arch.layers(); ++i) {
        const int fan_out = i < static_cast<int>(arch.hidden.size()) ? arch.hidden[i] : 1;
        LayerView v;
        v.w_offset = off;
        v.b_offset = off + static_cast<std::size_t>(fan_in) * fan_out;
        v.fan_in = fan_in;
        v.fan_out = fan_out;
        views.push_back(v);
        off = v.b_offset + fan_out;
        fan_in = fan_out;
    }
    return views;
}

void PeriodicArchitecture::validate() const {
    MlpArchitecture b = base();
    b.validate();
    if (groups.empty()) throw std::invalid_argument("periodic: at least one group required");
    std::vector<int> seen;
    for (const auto& g : groups) {
        if (g.max_frequency < 0) throw std::invalid_argument("periodic: max_frequency >= 0");
        if (g.angle_index < spatial_dim || g.angle_index >= input_dim()) {
            throw std::invalid_argument("periodic: angle_index must follow the spatial coordinates");
        }
        if (std::find(seen.begin(), seen.end(), g.angle_index) != seen.end()) {
            throw std::invalid_argument("periodic: duplicate angle_index");
        }
        seen.push_back(g.angle_index);
    }
}

std::size_t PeriodicArchitecture::block_count() const {
    std::size_t n = 0;
    for (const auto& g : groups) n += 2 * static_cast<std::size_t>(g.max_frequency) + 1;
    return n;
}

std::vector<BlockView> block_map(const PeriodicArchitecture& arch) {
    std::vector<BlockView> blocks;
    blocks.reserve(arch.block_count());
    const std::size_t stride = arch.base().param_count();
    std::size_t off = 0;
    for (int g = 0; g < static_cast<int>(arch.groups.size()); ++g) {
        // Frequency 0 exists only for cosine.
        for (int n = 0; n <= arch.groups[g].max_frequency; ++n) {
            blocks.push_back({g, n, false, off});
            off += stride;
        }
        for (int m = 1; m <= arch.groups[g].max_frequency; ++m) {
            blocks.push_back({g, m, true, off});
            off += stride;
        }
    }
    return blocks;
}

namespace {

// Per-layer pre-activations and activations for one forward pass.
struct MlpWorkspace {
    std::vector<std::vector<double>> z;  // z[i] = W_i y_i + b_i
    std::vector<std::vector<double>> y;  // y[0] = x, y[i+1] = relu(z[i])
    std::vector<double> delta_a;         // backward scratch
    std::vector<double> delta_b;

    void resize(const std::vector<LayerView>& layers) {
        z.resize(layers.size());
        y.resize(layers.size() + 1);
        int widest = 1;
        for (std::size_t i = 0; i < layers.size(); ++i) {
            z[i].resize(layers[i].fan_out);
            y[i].resize(layers[i].fan_in);
            widest = std::max(widest, layers[i].fan_out);
        }
        y[layers.size()].resize(1);
        delta_a.resize(widest);
        delta_b.resize(widest);
    }
};

double mlp_forward_one(const std::vector<LayerView>& layers, const double* theta, Span x,
                       MlpWorkspace& ws) {
    const auto& k = kernels::active();
    std::copy(x.begin(), x.end(), ws.y[0].begin());
    const std::size_t L = layers.size();
    for (std::size_t i = 0; i < L; ++i) {
        const LayerView& lv = layers[i];
        k.affine(lv.fan_out, lv.fan_in, theta + lv.w_offset, ws.y[i].data(),
                 theta + lv.b_offset, ws.z[i].data());
        if (i + 1 < L) {
            k.relu(lv.fan_out, ws.z[i].data(), ws.y[i + 1].data());
        }
    }
    return ws.z[L - 1][0];
}

// Reverse pass for one sample; ws must hold the matching forward state.
void mlp_backward_one(const std::vector<LayerView>& layers, const double* theta,
                      double upstream, MlpWorkspace& ws, double* grad) {
    const auto& k = kernels::active();
    const int L = static_cast<int>(layers.size());
    std::vector<double>& delta = ws.delta_a;
    std::vector<double>& next = ws.delta_b;
    delta[0] = upstream;
    for (int i = L - 1; i >= 0; --i) {
        const LayerView& lv = layers[i];
        // dW_i = delta (outer) y_i, db_i = delta.
        for (int r = 0; r < lv.fan_out; ++r) {
            if (delta[r] == 0.0) continue;
            k.axpy(lv.fan_in, delta[r], ws.y[i].data(), grad + lv.w_offset + static_cast<std::size_t>(r) * lv.fan_in);
        }
        k.axpy(lv.fan_out, 1.0, delta.data(), grad + lv.b_offset);
        if (i == 0) break;
        // delta_prev = W_i^T delta, masked by relu'(z_{i-1}).
        std::fill(next.begin(), next.begin() + lv.fan_in, 0.0);
        for (int r = 0; r < lv.fan_out; ++r) {
            if (delta[r] == 0.0) continue;
            k.axpy(lv.fan_in, delta[r], theta + lv.w_offset + static_cast<std::size_t>(r) * lv.fan_in, next.data());
        }
        k.relu_backprop(lv.fan_in, ws.z[i - 1].data(), next.data(), delta.data());
    }
}

double spectral_norm(const double* w, int rows, int cols) {
    // Power iteration on W^T W from a deterministic start.
    std::vector<double> v(cols, 1.0 / std::sqrt(static_cast<double>(cols)));
    std::vector<double> wv(rows), wtwv(cols);
    const auto& k = kernels::active();
    double sigma = 0.0;
    for (int it = 0; it < 60; ++it) {
        for (int r = 0; r < rows; ++r) wv[r] = k.dot(w + static_cast<std::size_t>(r) * cols, v.data(), cols);
        std::fill(wtwv.begin(), wtwv.end(), 0.0);
        for (int r = 0; r < rows; ++r) k.axpy(cols, wv[r], w + static_cast<std::size_t>(r) * cols, wtwv.data());
        const double n = std::sqrt(k.sum_squares(wtwv.data(), cols));
        if (n == 0.0) return 0.0;
        for (int c = 0; c < cols; ++c) v[c] = wtwv[c] / n;
        sigma = std::sqrt(n);
    }
    return sigma;
}

}  // namespace

Network::Network(MlpArchitecture arch) : arch_(std::move(arch)) {
    std::get<MlpArchitecture>(arch_).validate();
}

Network::Network(PeriodicArchitecture arch) : arch_(std::move(arch)) {
    std::get<PeriodicArchitecture>(arch_).validate();
}

std::size_t Network::param_count() const {
    if (const auto* m = mlp()) return m->param_count();
    return periodic()->param_count();
}

int Network::input_dim() const {
    if (const auto* m = mlp()) return m->input_dim;
    return periodic()->input_dim();
}

std::vector<double> Network::init(std::uint64_t seed) const {
    std::vector<double> theta(param_count(), 0.0);
    Rng rng(seed);
    const MlpArchitecture base = mlp() ? *mlp() : periodic()->base();
    const auto layers = layer_map(base);
    const std::size_t n_blocks = mlp() ? 1 : periodic()->block_count();
    const std::size_t stride = base.param_count();
    for (std::size_t b = 0; b < n_blocks; ++b) {
        double* th = theta.data() + b * stride;
        for (const auto& lv : layers) {
            const double bound = std::sqrt(6.0 / lv.fan_in);
            for (std::size_t i = 0; i < static_cast<std::size_t>(lv.fan_in) * lv.fan_out; ++i) {
                th[lv.w_offset + i] = rng.uniform(-bound, bound);
            }
            // biases stay zero
        }
    }
    return theta;
}

double Network::forward(Span theta, Span x) const {
    std::vector<double> out(1);
    std::vector<Point> pts{Point(x.begin(), x.end())};
    forward_batch(theta, pts, out);
    return out[0];
}

void Network::forward_batch(Span theta, const std::vector<Point>& pts,
                            std::vector<double>& out) const {
    if (theta.size() != param_count()) throw std::invalid_argument("forward: theta size mismatch");
    out.resize(pts.size());
    const int in_dim = input_dim();
    if (const auto* m = mlp()) {
        const auto layers = layer_map(*m);
        MlpWorkspace ws;
        ws.resize(layers);
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (static_cast<int>(pts[j].size()) != in_dim) {
                throw std::invalid_argument("forward: input dimension mismatch");
            }
            out[j] = mlp_forward_one(layers, theta.data(), pts[j], ws);
        }
        return;
    }
    const auto* p = periodic();
    const auto layers = layer_map(p->base());
    const auto blocks = block_map(*p);
    MlpWorkspace ws;
    ws.resize(layers);
    for (std::size_t j = 0; j < pts.size(); ++j) {
        if (static_cast<int>(pts[j].size()) != in_dim) {
            throw std::invalid_argument("forward: input dimension mismatch");
        }
        const Span spatial(pts[j].data(), p->spatial_dim);
        double acc = 0.0;
        for (const auto& b : blocks) {
            const double w = pts[j][p->groups[b.group].angle_index];
            const double factor = b.is_sin ? std::sin(b.frequency * w) : std::cos(b.frequency * w);
            if (factor == 0.0) continue;
            acc += factor * mlp_forward_one(layers, theta.data() + b.offset, spatial, ws);
        }
        out[j] = acc;
    }
}

void Network::accumulate_grad(Span theta, const std::vector<Point>& pts, Span upstream,
                              std::span<double> grad) const {
    if (theta.size() != param_count()) throw std::invalid_argument("grad: theta size mismatch");
    if (grad.size() != param_count()) throw std::invalid_argument("grad: grad size mismatch");
    if (pts.size() != upstream.size()) throw std::invalid_argument("grad: upstream size mismatch");
    if (const auto* m = mlp()) {
        const auto layers = layer_map(*m);
        MlpWorkspace ws;
        ws.resize(layers);
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (upstream[j] == 0.0) continue;
            mlp_forward_one(layers, theta.data(), pts[j], ws);
            mlp_backward_one(layers, theta.data(), upstream[j], ws, grad.data());
        }
        return;
    }
    const auto* p = periodic();
    const auto layers = layer_map(p->base());
    const auto blocks = block_map(*p);
    MlpWorkspace ws;
    ws.resize(layers);
    for (std::size_t j = 0; j < pts.size(); ++j) {
        if (upstream[j] == 0.0) continue;
        const Span spatial(pts[j].data(), p->spatial_dim);
        for (const auto& b : blocks) {
            const double w = pts[j][p->groups[b.group].angle_index];
            const double factor = b.is_sin ? std::sin(b.frequency * w) : std::cos(b.frequency * w);
            if (factor == 0.0) continue;
            mlp_forward_one(layers, theta.data() + b.offset, spatial, ws);
            mlp_backward_one(layers, theta.data() + b.offset, upstream[j] * factor, ws,
                             grad.data() + b.offset);
        }
    }
}

double Network::lipschitz_upper_bound(Span theta, double spatial_radius) const {
    if (theta.size() != param_count()) throw std::invalid_argument("lipschitz: theta size mismatch");
    const MlpArchitecture base = mlp() ? *mlp() : periodic()->base();
    const auto layers = layer_map(base);
    auto block_bound = [&](const double* th) {
        double prod = 1.0;
        for (const auto& lv : layers) {
            prod *= spectral_norm(th + lv.w_offset, lv.fan_out, lv.fan_in);
        }
        return prod;
    };
    if (mlp()) return block_bound(theta.data());

    const auto* p = periodic();
    const auto blocks = block_map(*p);
    // |grad_x Phi| <= sum_b L_b; |d/dw_g Phi| <= sum_{b in g} f_b (|phi_b(0)| + L_b R).
    double spatial = 0.0;
    std::vector<double> angular(p->groups.size(), 0.0);
    MlpWorkspace ws;
    ws.resize(layers);
    const Point origin(p->spatial_dim, 0.0);
    for (const auto& b : blocks) {
        const double lb = block_bound(theta.data() + b.offset);
        spatial += lb;
        const double at0 = std::abs(mlp_forward_one(layers, theta.data() + b.offset, origin, ws));
        angular[b.group] += b.frequency * (at0 + lb * spatial_radius);
    }
    double s = spatial * spatial;
    for (double a : angular) s += a * a;
    return std::sqrt(s);
}

}  // namespace hj
