#pragma once

#include <span>

#include "hj/common.hpp"

namespace hj {

// Continuous Hamiltonians H(x, p) with exact p-gradients and the closed-form
// monotonicity bound C_H(L) = max_{|p|<=L, x} |grad_p H|. Gradients use the
// convention sgn(0) = 0 at |.| kinks, matching the ReLU subgradient choice.
class Hamiltonian {
public:
    enum class Kind { EikonalSquared, EikonalNorm, Quadratic, ReedsShepp, PursuitEvasion };

    static Hamiltonian eikonal_squared();                     // |p|^2 - 1
    static Hamiltonian eikonal_norm();                        // |p| - 1
    static Hamiltonian quadratic();                           // |p|^2/2 + |x|^2/2
    static Hamiltonian reeds_shepp(double sigma, double rho); // state (x, y, omega)
    static Hamiltonian pursuit_evasion(double sigma_e, double rho_e,
                                       double sigma_p, double rho_p);  // (X, Y, w_e, w_p)

    Kind kind() const { return kind_; }

    double eval(Span x, Span p) const;
    void grad_p(Span x, Span p, std::span<double> out) const;
    std::vector<double> grad_p(Span x, Span p) const;

    /// Closed-form sup of |grad_p H| over |p| <= L; the monotonicity threshold for alpha.
    double ch_bound(double L) const;

    /// Fixed state dimension, or 0 when any dimension is accepted.
    int required_dim() const;

    double sigma() const { return sigma_; }
    double rho() const { return rho_; }
    double sigma_e() const { return sigma_e_; }
    double rho_e() const { return rho_e_; }
    double sigma_p() const { return sigma_; }
    double rho_p() const { return rho_; }

private:
    explicit Hamiltonian(Kind k) : kind_(k) {}
    void check_dims(Span x, Span p) const;

    Kind kind_;
    double sigma_ = 1.0, rho_ = 1.0;      // Reeds-Shepp; doubles as pursuer in the game
    double sigma_e_ = 1.0, rho_e_ = 1.0;  // evader
};

}  // namespace hj
