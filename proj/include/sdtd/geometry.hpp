#pragma once

#include <cmath>
#include <numbers>

namespace sdtd {

inline constexpr double kPi = std::numbers::pi;

/// Plain 2D vector.
struct Vec2 {
    double x{0.0};
    double y{0.0};

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }

    double norm() const { return std::hypot(x, y); }
    double angle() const { return std::atan2(y, x); }
    Vec2 normalized() const;
};

inline constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
inline constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }
inline Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline constexpr Vec2 mirror_x(Vec2 v) { return {v.x, -v.y}; }
Vec2 rotate(Vec2 v, double angle);

/// Wrap to [-pi, pi).
double wrap_angle(double a);

/// Distance from p to the segment [a, b].
double segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// Parameter in [0, 1] of the point of [a, b] closest to p.
double segment_closest_parameter(Vec2 p, Vec2 a, Vec2 b);

/// Game parameters and numerical tolerances.
struct GameConfig {
    double nu{0.5};         ///< defender speed, attacker speed is 1
    double r{1.0};          ///< capture radius
    double eps_safe{0.0};   ///< extra buffer added to r for separation formulas
    double tol_angle{1e-6};
    double tol_pos{1e-6};
    double tol_value{1e-4};
    double dt{1e-3};        ///< simulator step
    double h_ode{1e-3};     ///< Phase-II integrator step
    long step_budget{10'000'000};

    /// Throws ConfigError on out-of-range parameters.
    void validate() const;
    double r_safe() const { return r + eps_safe; }
};

/// Planar positions of both players, target at the origin.
struct GameState {
    Vec2 xD;
    Vec2 xA;

    double R() const { return distance(xD, xA); }
    double rhoD() const { return xD.norm(); }
    double rhoA() const { return xA.norm(); }
};

/// Orientation of the attacker around the defender. The clockwise family
/// is the mirror image of the counter-clockwise one.
enum class Chirality { CounterClockwise = 1, Clockwise = -1 };

inline double sign(Chirality c) { return c == Chirality::CounterClockwise ? 1.0 : -1.0; }

/// Coordinates on the capture circle: defender range and
/// theta = pi - angle(T, D, A).
struct ReducedState {
    double rhoD{0.0};
    double theta{0.0};
    Chirality chirality{Chirality::CounterClockwise};
};

/// Line-of-sight angle from the attacker toward the defender.
double los_angle(const GameState& s);

/// Reduced coordinates of any state with distinct, non-degenerate players.
/// No capture-circle check is performed.
ReducedState reduced_coordinates(const GameState& s);

/// Reduced coordinates of a state on the capture circle; throws
/// ConstraintError when |R - r_safe| > tol_pos.
ReducedState to_reduced(const GameState& s, const GameConfig& cfg);

/// Planar state of a reduced state with the defender at polar angle gamma.
GameState from_reduced(const ReducedState& rs, double gamma, const GameConfig& cfg);

/// Attacker range on the capture circle.
double rhoA_on_circle(double rhoD, double theta, double r);

}  // namespace sdtd
