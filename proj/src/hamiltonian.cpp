#include "hj/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

namespace hj {

Hamiltonian Hamiltonian::eikonal_squared() { return Hamiltonian(Kind::EikonalSquared); }
Hamiltonian Hamiltonian::eikonal_norm() { return Hamiltonian(Kind::EikonalNorm); }
Hamiltonian Hamiltonian::quadratic() { return Hamiltonian(Kind::Quadratic); }

Hamiltonian Hamiltonian::reeds_shepp(double sigma, double rho) {
    if (sigma <= 0.0 || rho <= 0.0) throw std::invalid_argument("reeds_shepp: sigma, rho must be > 0");
    Hamiltonian h(Kind::ReedsShepp);
    h.sigma_ = sigma;
    h.rho_ = rho;
    return h;
}

Hamiltonian Hamiltonian::pursuit_evasion(double sigma_e, double rho_e, double sigma_p, double rho_p) {
    if (sigma_e <= 0.0 || rho_e <= 0.0 || sigma_p <= 0.0 || rho_p <= 0.0) {
        throw std::invalid_argument("pursuit_evasion: all speeds and turn parameters must be > 0");
    }
    Hamiltonian h(Kind::PursuitEvasion);
    h.sigma_e_ = sigma_e;
    h.rho_e_ = rho_e;
    h.sigma_ = sigma_p;
    h.rho_ = rho_p;
    return h;
}

int Hamiltonian::required_dim() const {
    switch (kind_) {
        case Kind::ReedsShepp: return 3;
        case Kind::PursuitEvasion: return 4;
        default: return 0;
    }
}

void Hamiltonian::check_dims(Span x, Span p) const {
    if (x.size() != p.size()) throw std::invalid_argument("hamiltonian: dim(x) != dim(p)");
    const int req = required_dim();
    if (req != 0 && static_cast<int>(x.size()) != req) {
        throw std::invalid_argument("hamiltonian: wrong state dimension");
    }
}

double Hamiltonian::eval(Span x, Span p) const {
    check_dims(x, p);
    switch (kind_) {
        case Kind::EikonalSquared: {
            const double n = norm2(p);
            return n * n - 1.0;
        }
        case Kind::EikonalNorm:
            return norm2(p) - 1.0;
        case Kind::Quadratic: {
            const double np = norm2(p), nx = norm2(x);
            return 0.5 * np * np + 0.5 * nx * nx;
        }
        case Kind::ReedsShepp: {
            const double w = x[2];
            return sigma_ * std::abs(p[0] * std::cos(w) + p[1] * std::sin(w)) +
                   std::abs(p[2]) / rho_ - 1.0;
        }
        case Kind::PursuitEvasion: {
            const double we = x[2], wp = x[3];
            const double ce = p[0] * std::cos(we) + p[1] * std::sin(we);
            const double cp = p[0] * std::cos(wp) + p[1] * std::sin(wp);
            return sigma_ * std::abs(cp) + std::abs(p[3]) / rho_ -
                   sigma_e_ * std::abs(ce) - std::abs(p[2]) / rho_e_;
        }
    }
    return 0.0;
}

void Hamiltonian::grad_p(Span x, Span p, std::span<double> out) const {
    check_dims(x, p);
    if (out.size() != p.size()) throw std::invalid_argument("grad_p: output size mismatch");
    switch (kind_) {
        case Kind::EikonalSquared:
            for (std::size_t i = 0; i < p.size(); ++i) out[i] = 2.0 * p[i];
            break;
        case Kind::EikonalNorm: {
            const double n = norm2(p);
            if (n == 0.0) {
                for (auto& v : out) v = 0.0;
            } else {
                for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] / n;
            }
            break;
        }
        case Kind::Quadratic:
            for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i];
            break;
        case Kind::ReedsShepp: {
            const double w = x[2];
            const double s = sgn(p[0] * std::cos(w) + p[1] * std::sin(w));
            out[0] = sigma_ * s * std::cos(w);
            out[1] = sigma_ * s * std::sin(w);
            out[2] = sgn(p[2]) / rho_;
            break;
        }
        case Kind::PursuitEvasion: {
            const double we = x[2], wp = x[3];
            const double se = sgn(p[0] * std::cos(we) + p[1] * std::sin(we));
            const double sp = sgn(p[0] * std::cos(wp) + p[1] * std::sin(wp));
            out[0] = sigma_ * sp * std::cos(wp) - sigma_e_ * se * std::cos(we);
            out[1] = sigma_ * sp * std::sin(wp) - sigma_e_ * se * std::sin(we);
            out[2] = -sgn(p[2]) / rho_e_;
            out[3] = sgn(p[3]) / rho_;
            break;
        }
    }
}

std::vector<double> Hamiltonian::grad_p(Span x, Span p) const {
    std::vector<double> g(p.size());
    grad_p(x, p, g);
    return g;
}

double Hamiltonian::ch_bound(double L) const {
    if (L <= 0.0) throw std::invalid_argument("ch_bound: L must be > 0");
    switch (kind_) {
        case Kind::EikonalSquared: return 2.0 * L;
        case Kind::EikonalNorm: return 1.0;
        case Kind::Quadratic: return L;
        case Kind::ReedsShepp:
            return std::sqrt(sigma_ * sigma_ + 1.0 / (rho_ * rho_));
        case Kind::PursuitEvasion: {
            const double s = sigma_ + sigma_e_;
            return std::sqrt(s * s + 1.0 / (rho_e_ * rho_e_) + 1.0 / (rho_ * rho_));
        }
    }
    return 0.0;
}

}  // namespace hj
