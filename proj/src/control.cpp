#include "hj/control.hpp"

#include <cmath>
#include <stdexcept>

namespace hj::control {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Forward-difference partial of phi along coordinate axis at step fd_delta.
double fd_partial(const Value& phi, Point x, int axis, double fd_delta, double base) {
    x[axis] += fd_delta;
    return (phi(x) - base) / fd_delta;
}

}  // namespace

double wrap_angle(double w) {
    w = std::fmod(w, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w;
}

CarControl car_feedback(const Value& phi, double fd_delta, const CarState& s) {
    if (fd_delta <= 0.0) throw std::invalid_argument("car_feedback: fd_delta must be > 0");
    const Point x{s.x, s.y, s.omega};
    const double base = phi(x);
    const double dx = fd_partial(phi, x, 0, fd_delta, base);
    const double dy = fd_partial(phi, x, 1, fd_delta, base);
    const double dw = fd_partial(phi, x, 2, fd_delta, base);
    CarControl c;
    c.a = static_cast<int>(-sgn(dx * std::cos(s.omega) + dy * std::sin(s.omega)));
    c.b = static_cast<int>(-sgn(dw));
    return c;
}

CarRollout rollout_car(const Value& phi, const CarParams& params, const CarState& s0, double dt,
                       double t_max, double target_radius, double fd_delta) {
    if (dt <= 0.0) throw std::invalid_argument("rollout_car: dt must be > 0");
    CarRollout out;
    CarState s = s0;
    s.omega = wrap_angle(s.omega);
    double t = 0.0;
    for (;;) {
        const double dist = std::hypot(s.x, s.y);
        if (dist <= target_radius) {
            out.rows.push_back({t, s, {0, 0}, dist});
            out.outcome = CarOutcome::ReachedTarget;
            out.time = t;
            return out;
        }
        if (t >= t_max) {
            out.rows.push_back({t, s, {0, 0}, dist});
            out.outcome = CarOutcome::Timeout;
            out.time = t;
            return out;
        }
        const CarControl c = car_feedback(phi, fd_delta, s);
        out.rows.push_back({t, s, c, dist});
        s.x += dt * params.sigma * c.a * std::cos(s.omega);
        s.y += dt * params.sigma * c.a * std::sin(s.omega);
        s.omega = wrap_angle(s.omega + dt * c.b / params.rho);
        t += dt;
    }
}

GameControl game_feedback(const Value& phi, double fd_delta, const GameState& s) {
    if (fd_delta <= 0.0) throw std::invalid_argument("game_feedback: fd_delta must be > 0");
    const Point x{s.X, s.Y, s.omega_e, s.omega_p};
    const double base = phi(x);
    const double dX = fd_partial(phi, x, 0, fd_delta, base);
    const double dY = fd_partial(phi, x, 1, fd_delta, base);
    const double dwe = fd_partial(phi, x, 2, fd_delta, base);
    const double dwp = fd_partial(phi, x, 3, fd_delta, base);
    GameControl c;
    c.a_p = static_cast<int>(-sgn(dX * std::cos(s.omega_p) + dY * std::sin(s.omega_p)));
    c.b_p = static_cast<int>(-sgn(dwp));
    c.a_e = static_cast<int>(sgn(dX * std::cos(s.omega_e) + dY * std::sin(s.omega_e)));
    c.b_e = static_cast<int>(sgn(dwe));
    return c;
}

GameRollout rollout_game(const Value& phi, const CarParams& evader, const CarParams& pursuer,
                         const GameState& s0, double dt, double t_max, double capture_radius,
                         double escape_radius, double fd_delta) {
    if (dt <= 0.0) throw std::invalid_argument("rollout_game: dt must be > 0");
    GameRollout out;
    GameState s = s0;
    s.omega_e = wrap_angle(s.omega_e);
    s.omega_p = wrap_angle(s.omega_p);
    double t = 0.0;
    for (;;) {
        const double dist = std::hypot(s.X, s.Y);
        if (dist <= capture_radius) {
            out.rows.push_back({t, s, {}, dist});
            out.outcome = GameOutcome::Captured;
            out.time = t;
            return out;
        }
        if (dist >= escape_radius) {
            out.rows.push_back({t, s, {}, dist});
            out.outcome = GameOutcome::Escaped;
            out.time = t;
            return out;
        }
        if (t >= t_max) {
            out.rows.push_back({t, s, {}, dist});
            out.outcome = GameOutcome::Timeout;
            out.time = t;
            return out;
        }
        const GameControl c = game_feedback(phi, fd_delta, s);
        out.rows.push_back({t, s, c, dist});
        s.X += dt * (evader.sigma * c.a_e * std::cos(s.omega_e) -
                     pursuer.sigma * c.a_p * std::cos(s.omega_p));
        s.Y += dt * (evader.sigma * c.a_e * std::sin(s.omega_e) -
                     pursuer.sigma * c.a_p * std::sin(s.omega_p));
        s.omega_e = wrap_angle(s.omega_e + dt * c.b_e / evader.rho);
        s.omega_p = wrap_angle(s.omega_p + dt * c.b_p / pursuer.rho);
        t += dt;
    }
}

}  // namespace hj::control
