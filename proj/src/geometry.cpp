#include "sdtd/geometry.hpp"

#include <algorithm>
#include <string>

#include "sdtd/errors.hpp"

namespace sdtd {

Vec2 Vec2::normalized() const {
    const double n = norm();
    if (n == 0.0) throw GeometryError("cannot normalize a zero vector");
    return {x / n, y / n};
}

Vec2 rotate(Vec2 v, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

double wrap_angle(double a) {
    double w = std::fmod(a + kPi, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    return w - kPi;
}

double segment_closest_parameter(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return 0.0;
    return std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
}

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const double u = segment_closest_parameter(p, a, b);
    return distance(p, a + (b - a) * u);
}

void GameConfig::validate() const {
    auto bad = [](const std::string& m) { throw ConfigError(m); };
    if (!(nu > 0.0 && nu < 1.0)) bad("nu must lie in (0, 1)");
    if (!(r > 0.0) || !std::isfinite(r)) bad("r must be positive");
    if (!(eps_safe >= 0.0)) bad("eps_safe must be non-negative");
    if (!(tol_angle > 0.0) || !(tol_pos > 0.0) || !(tol_value > 0.0)) bad("tolerances must be positive");
    if (!(dt > 0.0) || !(h_ode > 0.0)) bad("time steps must be positive");
    if (step_budget <= 0) bad("step budget must be positive");
}

double los_angle(const GameState& s) {
    const Vec2 d = s.xD - s.xA;
    if (d.norm() == 0.0) throw GeometryError("defender and attacker coincide");
    return d.angle();
}

ReducedState reduced_coordinates(const GameState& s) {
    const double rho = s.rhoD();
    if (rho == 0.0) throw GeometryError("defender at the target");
    const Vec2 rel = s.xA - s.xD;
    if (rel.norm() == 0.0) throw GeometryError("defender and attacker coincide");
    // Angle of D->A measured from the outward radial direction of D.
    const double phi = wrap_angle(rel.angle() - s.xD.angle());
    ReducedState rs;
    rs.rhoD = rho;
    rs.theta = std::abs(phi);
    rs.chirality = phi >= 0.0 ? Chirality::CounterClockwise : Chirality::Clockwise;
    if (rs.theta >= kPi) rs.theta = kPi;
    return rs;
}

ReducedState to_reduced(const GameState& s, const GameConfig& cfg) {
    if (std::abs(s.R() - cfg.r_safe()) > cfg.tol_pos)
        throw ConstraintError("state is not on the capture circle");
    return reduced_coordinates(s);
}

GameState from_reduced(const ReducedState& rs, double gamma, const GameConfig& cfg) {
    const double k = sign(rs.chirality);
    GameState s;
    const Vec2 u = unit(gamma);
    const Vec2 n{-u.y, u.x};
    // Reflect about pi/2 so that theta = pi lands exactly on the line TD.
    const double back = kPi - rs.theta;
    const double c = rs.theta > kPi / 2 ? -std::cos(back) : std::cos(rs.theta);
    const double sn = rs.theta > kPi / 2 ? std::sin(back) : std::sin(rs.theta);
    s.xD = u * rs.rhoD;
    s.xA = u * (rs.rhoD + cfg.r_safe() * c) + n * (k * cfg.r_safe() * sn);
    return s;
}

double rhoA_on_circle(double rhoD, double theta, double r) {
    return std::sqrt(std::max(0.0, rhoD * rhoD + r * r + 2.0 * rhoD * r * std::cos(theta)));
}

}  // namespace sdtd
