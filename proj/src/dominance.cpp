#include "sdtd/dominance.hpp"

#include <algorithm>
#include <cmath>

#include "sdtd/errors.hpp"

namespace sdtd {

namespace {

constexpr double kClampGuard = 1e-9;

double guarded_acos(double arg) {
    if (std::abs(arg) > 1.0 + kClampGuard) throw NumericalError("arccos argument out of range");
    return std::acos(std::clamp(arg, -1.0, 1.0));
}

void require_outside_disk(const GameState& s, const GameConfig& cfg, bool strict) {
    const double R = s.R();
    if (strict ? !(R > cfg.r) : (R < cfg.r))
        throw GeometryError("attacker within the capture disk");
}

}  // namespace

std::vector<Vec2> CartesianOval::closed_polyline() const {
    std::vector<Vec2> out;
    out.reserve(2 * samples.size());
    for (const auto& s : samples) out.push_back(s.point_near);
    for (auto it = samples.rbegin(); it != samples.rend(); ++it) out.push_back(it->point_far);
    return out;
}

double defender_margin(Vec2 p, const GameState& s, const GameConfig& cfg) {
    return distance(p, s.xD) - cfg.r - cfg.nu * distance(p, s.xA);
}

double phi_bar_max(const GameState& s, const GameConfig& cfg) {
    require_outside_disk(s, cfg, false);
    const double R = s.R();
    const double nu = cfg.nu;
    const double r = cfg.r;
    const double arg = (std::sqrt((1.0 - nu * nu) * (R * R - r * r)) - nu * r) / R;
    return guarded_acos(arg);
}

double oval_distance(const GameState& s, const GameConfig& cfg, double phi_bar, OvalBranch branch) {
    require_outside_disk(s, cfg, true);
    const double phi_S = phi_bar_max(s, cfg);
    if (std::abs(phi_bar) > phi_S + 1e-12) throw OutOfSupportError("phi_bar outside the oval cone");
    const double nu = cfg.nu;
    const double r = cfg.r;
    const double R = s.R();
    const double eta = nu * r + R * std::cos(phi_bar);
    double disc = eta * eta - (1.0 - nu * nu) * (R * R - r * r);
    if (disc < 0.0) disc = 0.0;  // tangency drift
    const double root = std::sqrt(disc);
    const double l = branch == OvalBranch::Near ? eta - root : eta + root;
    return l / (1.0 - nu * nu);
}

Vec2 oval_point(const GameState& s, const GameConfig& cfg, double phi_bar, OvalBranch branch) {
    const double l = oval_distance(s, cfg, phi_bar, branch);
    return s.xA + unit(phi_bar + los_angle(s)) * l;
}

CartesianOval sample_oval(const GameState& s, const GameConfig& cfg, int n_per_branch) {
    if (n_per_branch < 2) throw ConfigError("oval needs at least two samples per branch");
    CartesianOval oval;
    oval.state = s;
    oval.config = cfg;
    oval.phi_bar_S = phi_bar_max(s, cfg);
    require_outside_disk(s, cfg, true);
    const double lam = los_angle(s);
    oval.samples.reserve(n_per_branch);
    for (int k = 0; k < n_per_branch; ++k) {
        const double phi = -oval.phi_bar_S + 2.0 * oval.phi_bar_S * k / (n_per_branch - 1);
        OvalSample o;
        o.phi_bar = phi;
        o.l_near = oval_distance(s, cfg, phi, OvalBranch::Near);
        o.l_far = oval_distance(s, cfg, phi, OvalBranch::Far);
        o.point_near = s.xA + unit(phi + lam) * o.l_near;
        o.point_far = s.xA + unit(phi + lam) * o.l_far;
        oval.samples.push_back(o);
    }
    return oval;
}

bool in_defender_dominance(Vec2 p, const GameState& s, const GameConfig& cfg) {
    return defender_margin(p, s, cfg) <= 0.0;
}

bool in_attacker_dominance(Vec2 p, const GameState& s, const GameConfig& cfg) {
    auto margin = [&](double mu) { return defender_margin(s.xA * mu + p * (1.0 - mu), s, cfg); };
    if (margin(1.0) <= 0.0) return false;
    constexpr int n = 256;
    std::vector<double> m(n + 1);
    for (int k = 0; k <= n; ++k) {
        m[k] = margin(static_cast<double>(k) / n);
        if (m[k] <= 0.0) return false;
    }
    // All samples positive: a dip below zero can only hide near a sampled
    // local minimum, so refine each one.
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int k = 0; k <= n; ++k) {
        const bool left_ok = k == 0 || m[k] <= m[k - 1];
        const bool right_ok = k == n || m[k] <= m[k + 1];
        if (!(left_ok && right_ok)) continue;
        double a = static_cast<double>(std::max(k - 1, 0)) / n;
        double b = static_cast<double>(std::min(k + 1, n)) / n;
        double c = b - invphi * (b - a);
        double d = a + invphi * (b - a);
        double fc = margin(c), fd = margin(d);
        while (b - a > 1e-12) {
            if (fc <= 0.0 || fd <= 0.0) return false;
            if (fc < fd) {
                b = d; d = c; fd = fc;
                c = b - invphi * (b - a);
                fc = margin(c);
            } else {
                a = c; c = d; fc = fd;
                d = a + invphi * (b - a);
                fd = margin(d);
            }
        }
        if (std::min(fc, fd) <= 0.0) return false;
    }
    return true;
}

bool is_blocking(const GameState& s, const GameConfig& cfg) {
    require_outside_disk(s, cfg, true);
    const Vec2 target{0.0, 0.0};
    return !in_defender_dominance(target, s, cfg) && !in_attacker_dominance(target, s, cfg);
}

double angle_ATD(const GameState& s) {
    if (s.rhoA() == 0.0 || s.rhoD() == 0.0) return 0.0;
    return std::abs(wrap_angle(s.xA.angle() - s.xD.angle()));
}

}  // namespace sdtd
