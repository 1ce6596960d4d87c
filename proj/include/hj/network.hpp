#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "hj/common.hpp"

namespace hj {

// Fully connected ReLU MLP with scalar output:
//   y_0 = x,  y_i = relu(W_{i-1} y_{i-1} + b_{i-1}),  out = W_L y_L + b_L.
struct MlpArchitecture {
    int input_dim = 1;
    std::vector<int> hidden;

    void validate() const;
    int layers() const { return static_cast<int>(hidden.size()) + 1; }
    std::size_t param_count() const;
};

struct LayerView {
    std::size_t w_offset;
    std::size_t b_offset;
    int fan_in;
    int fan_out;
};

/// Flat parameter layout: per affine layer, row-major W then b.
std::vector<LayerView> layer_map(const MlpArchitecture& arch);

struct PeriodicGroup {
    int angle_index;    // position of the angle in the input vector
    int max_frequency;  // n_max
};

// Trigonometric combination of base MLPs, 2pi-periodic in every angle:
//   Phi(x, w) = sum_g [ sum_{n=0..n_max} phi(x; th_{g,cos,n}) cos(n w_g)
//                     + sum_{m=1..n_max} phi(x; th_{g,sin,m}) sin(m w_g) ].
// One independent base-MLP parameter block per (group, frequency, trig) term.
struct PeriodicArchitecture {
    int spatial_dim = 1;
    std::vector<PeriodicGroup> groups;
    std::vector<int> hidden;  // hidden widths of each base MLP

    void validate() const;
    MlpArchitecture base() const { return {spatial_dim, hidden}; }
    int input_dim() const { return spatial_dim + static_cast<int>(groups.size()); }
    std::size_t block_count() const;
    std::size_t param_count() const { return block_count() * base().param_count(); }
};

struct BlockView {
    int group;
    int frequency;
    bool is_sin;
    std::size_t offset;  // into the flat parameter vector
};

std::vector<BlockView> block_map(const PeriodicArchitecture& arch);

// Value-semantic handle over either architecture. Forward and gradient
// evaluations are pure in (theta, x); gradient accumulation runs in batch
// index order so seeded runs reproduce bit-for-bit.
class Network {
public:
    explicit Network(MlpArchitecture arch);
    explicit Network(PeriodicArchitecture arch);

    std::size_t param_count() const;
    int input_dim() const;

    const MlpArchitecture* mlp() const { return std::get_if<MlpArchitecture>(&arch_); }
    const PeriodicArchitecture* periodic() const { return std::get_if<PeriodicArchitecture>(&arch_); }

    // Weights uniform on [-sqrt(6/fan_in), sqrt(6/fan_in)], biases zero.
    std::vector<double> init(std::uint64_t seed) const;

    double forward(Span theta, Span x) const;
    void forward_batch(Span theta, const std::vector<Point>& pts, std::vector<double>& out) const;

    /// grad += sum_j upstream[j] * grad_theta Phi(pts[j]; theta), in index order.
    void accumulate_grad(Span theta, const std::vector<Point>& pts, Span upstream,
                         std::span<double> grad) const;

    // Product of layer spectral norms (power iteration), an upper bound on the
    // Lipschitz constant of x -> Phi(x). For periodic nets the angular
    // directions are bounded over {|x_spatial| <= spatial_radius} x torus.
    double lipschitz_upper_bound(Span theta, double spatial_radius = 0.0) const;

private:
    std::variant<MlpArchitecture, PeriodicArchitecture> arch_;
};

}  // namespace hj
