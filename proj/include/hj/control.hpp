#pragma once

#include <functional>
#include <vector>

#include "hj/common.hpp"

namespace hj::control {

using Value = std::function<double(Span)>;  // trained value-function surrogate

struct CarParams {
    double sigma = 1.0;  // max speed
    double rho = 1.0;    // inverse angular velocity; turning radius = sigma * rho
    double turning_radius() const { return sigma * rho; }
};

struct CarState {
    double x = 0.0;
    double y = 0.0;
    double omega = 0.0;  // wrapped to [0, 2pi)
};

struct GameState {
    double X = 0.0;  // evader minus pursuer position
    double Y = 0.0;
    double omega_e = 0.0;
    double omega_p = 0.0;
};

struct CarControl {
    int a = 0;  // forward/backward in {-1, 0, 1}
    int b = 0;  // steering in {-1, 0, 1}
};

// Feedback from forward differences of the value function at step fd_delta
// (the delta of the final training stage):
//   a = -sgn(dx Phi cos w + dy Phi sin w),  b = -sgn(dw Phi).
CarControl car_feedback(const Value& phi, double fd_delta, const CarState& s);

enum class CarOutcome { ReachedTarget, Timeout };

struct CarTraceRow {
    double t;
    CarState state;
    CarControl control;
    double distance;  // to the origin
};

struct CarRollout {
    std::vector<CarTraceRow> rows;
    CarOutcome outcome = CarOutcome::Timeout;
    double time = 0.0;
};

// Explicit Euler rollout of the Reeds-Shepp dynamics with feedback recomputed
// each step; stops at sqrt(x^2+y^2) <= target_radius or t >= t_max.
CarRollout rollout_car(const Value& phi, const CarParams& params, const CarState& s0, double dt,
                       double t_max, double target_radius, double fd_delta);

struct GameControl {
    int a_e = 0, b_e = 0;  // evader maximizes: positive sgn
    int a_p = 0, b_p = 0;  // pursuer minimizes: negative sgn
};

GameControl game_feedback(const Value& phi, double fd_delta, const GameState& s);

enum class GameOutcome { Captured, Escaped, Timeout };

struct GameTraceRow {
    double t;
    GameState state;
    GameControl control;
    double distance;  // between the players
};

struct GameRollout {
    std::vector<GameTraceRow> rows;
    GameOutcome outcome = GameOutcome::Timeout;
    double time = 0.0;
};

// Relative-coordinate pursuit-evasion rollout; capture at distance <= r,
// escape at distance >= R.
GameRollout rollout_game(const Value& phi, const CarParams& evader, const CarParams& pursuer,
                         const GameState& s0, double dt, double t_max, double capture_radius,
                         double escape_radius, double fd_delta);

double wrap_angle(double w);  // into [0, 2pi)

}  // namespace hj::control
