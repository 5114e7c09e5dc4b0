#include "sdtd/phase2.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "sdtd/errors.hpp"

namespace sdtd {

namespace {

constexpr int kGridSize = 1024;
constexpr double kEdge = 1e-12;
constexpr double kPsiLo = kPi / 2.0;
constexpr double kPsiHi = 3.0 * kPi / 2.0;

// Objective and stationarity condition written in psi = theta + phiD, the
// defender heading measured from the outward radial direction.
struct HeadingModel {
    double rho;
    double theta;
    double nu;
    double r;
    double ct;  // cos theta
    double st;  // sin theta

    void parts(double psi, double& N, double& D, double& Np, double& Dp) const {
        const double sp = std::sin(psi);
        const double cp = std::cos(psi);
        const double c = cp * ct + sp * st;  // cos(psi - theta)
        const double s = sp * ct - cp * st;  // sin(psi - theta)
        const double q = std::sqrt(1.0 - nu * nu * c * c);
        N = -(nu / rho) * sp + (q - nu * s) / r;
        D = -nu * cp;
        Np = -(nu / rho) * cp + (nu * nu * c * s / q - nu * c) / r;
        Dp = nu * sp;
    }

    // theta-rate per unit of range closed.
    double J(double psi) const {
        double N, D, Np, Dp;
        parts(psi, N, D, Np, Dp);
        return N / D;
    }

    // Same sign as dJ/dpsi.
    double G(double psi) const {
        double N, D, Np, Dp;
        parts(psi, N, D, Np, Dp);
        return Np * D - N * Dp;
    }

    // G and its derivative; the N'D' terms cancel in G'.
    void G_and_slope(double psi, double& g, double& dg, double& sp, double& cp) const {
        sp = std::sin(psi);
        cp = std::cos(psi);
        const double c = cp * ct + sp * st;
        const double s = sp * ct - cp * st;
        const double q = std::sqrt(1.0 - nu * nu * c * c);
        const double N = -(nu / rho) * sp + (q - nu * s) / r;
        const double D = -nu * cp;
        const double Np = -(nu / rho) * cp + (nu * nu * c * s / q - nu * c) / r;
        const double Dp = nu * sp;
        const double Npp =
            (nu / rho) * sp + (nu * nu * (c * c - s * s) / q - nu * nu * nu * nu * c * c * s * s / (q * q * q) + nu * s) / r;
        g = Np * D - N * Dp;
        dg = Npp * D - N * nu * cp;
    }
};

HeadingModel make_model(const ReducedState& rs, const GameConfig& cfg) {
    return {rs.rhoD, rs.theta, cfg.nu, cfg.r_safe(), std::cos(rs.theta), std::sin(rs.theta)};
}

double root_in(const HeadingModel& m, double a, double b, double ga, double gb) {
    std::uintmax_t iters = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(52);
    auto g = [&](double psi) { return m.G(psi); };
    const auto res = boost::math::tools::toms748_solve(g, a, b, ga, gb, tol, iters);
    return 0.5 * (res.first + res.second);
}

double full_search(const HeadingModel& m) {
    const double step = (kPsiHi - kPsiLo) / kGridSize;
    int best = -1;
    double best_J = 0.0;
    for (int k = 0; k < kGridSize; ++k) {
        const double J = m.J(kPsiLo + (k + 0.5) * step);
        if (!std::isfinite(J)) throw NumericalError("non-finite heading objective");
        if (best < 0 || J < best_J) {
            best = k;
            best_J = J;
        }
    }
    const double c = kPsiLo + (best + 0.5) * step;
    const double a = std::max(kPsiLo + kEdge, c - step);
    const double b = std::min(kPsiHi - kEdge, c + step);
    const double ga = m.G(a);
    const double gb = m.G(b);
    if (ga < 0.0 && gb > 0.0) return root_in(m, a, b, ga, gb);
    // Minimum pressed against an edge of the admissible interval.
    auto J = [&](double psi) { return m.J(psi); };
    return boost::math::tools::brent_find_minima(J, a, b, 40).first;
}

// On a Newton exit sc receives sin and cos of the result, advanced from the
// last iterate by the final step (third-order error, below rounding).
double warm_search(const HeadingModel& m, double hint, bool& ok, double* sc = nullptr) {
    ok = false;
    if (!(hint > kPsiLo && hint < kPsiHi)) return hint;
    // Newton from the hint; the result must stay close and be a minimum.
    double psi = hint;
    for (int it = 0; it < 8; ++it) {
        double g, dg, sp, cp;
        m.G_and_slope(psi, g, dg, sp, cp);
        if (!(dg > 0.0)) break;
        const double step = g / dg;
        psi -= step;
        if (std::abs(psi - hint) > 2e-3) break;
        // quadratic convergence: the error after a 1e-8 step is at rounding level
        if (std::abs(step) <= 1e-8) {
            ok = psi > kPsiLo && psi < kPsiHi;
            if (!ok) break;
            if (sc) {
                const double h2 = 0.5 * step * step;
                sc[0] = sp - step * cp - h2 * sp;
                sc[1] = cp + step * sp - h2 * cp;
            }
            return psi;
        }
    }
    double w = 2e-3;
    for (int attempt = 0; attempt < 4; ++attempt, w *= 8.0) {
        const double a = std::max(kPsiLo + kEdge, hint - w);
        const double b = std::min(kPsiHi - kEdge, hint + w);
        const double ga = m.G(a);
        const double gb = m.G(b);
        if (ga < 0.0 && gb > 0.0) {
            ok = true;
            return root_in(m, a, b, ga, gb);
        }
    }
    return hint;
}

struct Y {
    double rho;
    double theta;
    double alpha;
};

// Right-hand side under the equilibrium pair; remembers the last heading to
// warm-start the next solve.
class Field {
public:
    explicit Field(const GameConfig& cfg) : cfg_(cfg) {}

    void set_hint(double psi) {
        hint_ = psi;
        have_hint_ = true;
    }

    Y eval(const Y& y, double* psi_out = nullptr) {
        const HeadingModel m = make_model({y.rho, y.theta, Chirality::CounterClockwise}, cfg_);
        bool ok = false;
        double sc[2] = {2.0, 2.0};
        double psi = have_hint_ ? warm_search(m, hint_, ok, sc) : 0.0;
        if (!ok) psi = full_search(m);
        set_hint(psi);
        if (psi_out) *psi_out = psi;
        if (sc[0] > 1.5) {
            sc[0] = std::sin(psi);
            sc[1] = std::cos(psi);
        }
        // reduced dynamics under the equilibrium reply, sin(phiA) = q
        const double sp = sc[0];
        const double cp = sc[1];
        const double c = cp * m.ct + sp * m.st;
        const double s = sp * m.ct - cp * m.st;
        const double nu = cfg_.nu;
        const double q = std::sqrt(1.0 - nu * nu * c * c);
        return {nu * cp, -(nu / y.rho) * sp + (q - nu * s) / m.r, nu * sp / y.rho};
    }

    Y rk4(const Y& y, double h, double* psi0 = nullptr) {
        const Y k1 = eval(y, psi0);
        const Y k2 = eval({y.rho + 0.5 * h * k1.rho, y.theta + 0.5 * h * k1.theta, y.alpha + 0.5 * h * k1.alpha});
        const Y k3 = eval({y.rho + 0.5 * h * k2.rho, y.theta + 0.5 * h * k2.theta, y.alpha + 0.5 * h * k2.alpha});
        const Y k4 = eval({y.rho + h * k3.rho, y.theta + h * k3.theta, y.alpha + h * k3.alpha});
        return {y.rho + h / 6.0 * (k1.rho + 2.0 * k2.rho + 2.0 * k3.rho + k4.rho),
                y.theta + h / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta),
                y.alpha + h / 6.0 * (k1.alpha + 2.0 * k2.alpha + 2.0 * k3.alpha + k4.alpha)};
    }

    double hint() const { return hint_; }

private:
    const GameConfig& cfg_;
    double hint_{kPi};
    bool have_hint_{false};
};

struct Events {
    double g_target;    // rho - r
    double g_dagger;    // rho - rho_dagger(theta)
    double g_attacker;  // theta_dagger(rho) - theta

    double min() const { return std::min({g_target, g_dagger, g_attacker}); }
};

Events events_at(double rho, double theta, const GameConfig& cfg) {
    const double rs = cfg.r_safe();
    const double nu = cfg.nu;
    const double arg = std::min(1.0, rs * std::sqrt(1.0 - nu * nu) / std::max(rho, 1e-300));
    const double th_dag = kPi - std::acos(nu) + std::asin(arg);
    return {rho - cfg.r, rho - rhoD_dagger(theta, cfg), th_dag - theta};
}

TerminalKind kind_from_events(double rho, double theta, const Events& e, const GameConfig& cfg) {
    if (std::abs(rho - cfg.r) <= cfg.tol_value && std::abs(kPi - theta) <= cfg.tol_value)
        return TerminalKind::BarrierCorner;
    return std::min(e.g_target, e.g_dagger) <= e.g_attacker ? TerminalKind::DefenderWin
                                                            : TerminalKind::AttackerWin;
}

void label_terminal(Phase2Trajectory& tr, double rho, double theta, TerminalKind kind, bool defender_side,
                    const GameConfig& cfg) {
    tr.terminal_kind = kind;
    tr.rhoD_f = rho;
    tr.theta_f = theta;
    tr.margin = defender_side ? kPi - theta : cfg.r - rho;
    switch (kind) {
        case TerminalKind::BarrierCorner: tr.value = 0.0; break;
        case TerminalKind::DefenderWin: tr.value = kPi - theta; break;
        case TerminalKind::AttackerWin: tr.value = -rho; break;
    }
}

bool defender_side(const Events& e) { return std::min(e.g_target, e.g_dagger) <= e.g_attacker; }

Phase2Sample make_sample(double t, const Y& y, double psi) {
    return {t, y.rho, y.theta, y.alpha, wrap_angle(psi - y.theta)};
}

// Largest fraction s in (0, 1] of a step with g > 0, bracketing the first
// sign change of g along the step.
template <class Fn>
double localize(Field& field, const Y& y, double h, double psi0, Fn g, const GameConfig& cfg) {
    double lo = 0.0;
    double hi = 1.0;
    const double scale = std::max(1.0, std::abs(h));
    while ((hi - lo) * scale > 1e-3 * cfg.tol_pos && hi - lo > 1e-15) {
        const double mid = 0.5 * (lo + hi);
        field.set_hint(psi0);
        if (g(field.rk4(y, mid * h)) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

}  // namespace

Phase2Rates reduced_dynamics(const ReducedState& rs, const Phase2Controls& u, const GameConfig& cfg) {
    const double nu = cfg.nu;
    const double psi = rs.theta + u.phiD;
    return {nu * std::cos(psi),
            -(nu / rs.rhoD) * std::sin(psi) + (std::sin(u.phiA) - nu * std::sin(u.phiD)) / cfg.r_safe()};
}

double attacker_constrained_heading(double phiD, const GameConfig& cfg) {
    const double a = std::acos(std::clamp(cfg.nu * std::cos(phiD), -1.0, 1.0));
    return phiD < 0.0 ? -a : a;
}

double attacker_equilibrium_heading(double phiD, const GameConfig& cfg) {
    return std::acos(std::clamp(cfg.nu * std::cos(phiD), -1.0, 1.0));
}

double rhoD_dagger(double theta, const GameConfig& cfg) {
    const double nu = cfg.nu;
    const double s = std::sin(theta);
    return nu * cfg.r_safe() * (nu * std::cos(theta) + std::sqrt(1.0 - nu * nu * s * s)) / (1.0 - nu * nu);
}

double theta_dagger(double rhoD, const GameConfig& cfg) {
    if (rhoD < cfg.r) throw GeometryError("defender range below the capture radius");
    const double nu = cfg.nu;
    const double arg = std::min(1.0, cfg.r_safe() * std::sqrt(1.0 - nu * nu) / rhoD);
    return kPi - std::acos(nu) + std::asin(arg);
}

double slope_objective(const ReducedState& rs, double phiD, const GameConfig& cfg) {
    const Phase2Rates rates = reduced_dynamics(rs, {phiD, attacker_equilibrium_heading(phiD, cfg)}, cfg);
    return rates.d_theta / rates.d_rhoD;
}

double optimal_defender_heading(const ReducedState& rs, const GameConfig& cfg) {
    const HeadingModel m = make_model(rs, cfg);
    return wrap_angle(full_search(m) - rs.theta);
}

double optimal_defender_heading(const ReducedState& rs, const GameConfig& cfg, double psi_hint) {
    const HeadingModel m = make_model(rs, cfg);
    bool ok = false;
    const double psi = warm_search(m, psi_hint, ok);
    return wrap_angle((ok ? psi : full_search(m)) - rs.theta);
}

std::string to_string(TerminalKind k) {
    switch (k) {
        case TerminalKind::DefenderWin: return "defender-win";
        case TerminalKind::AttackerWin: return "attacker-win";
        case TerminalKind::BarrierCorner: return "barrier-corner";
    }
    return "unknown";
}

std::string to_string(StopReason k) {
    switch (k) {
        case StopReason::Terminal: return "terminal";
        case StopReason::RangeLimit: return "range-limit";
        case StopReason::SingularSurface: return "singular-surface";
        case StopReason::TerminalRegion: return "terminal-region";
        case StopReason::TimeLimit: return "time-limit";
    }
    return "unknown";
}

bool terminal_check(double rhoD, double theta, const GameConfig& cfg, TerminalKind& kind) {
    const Events e = events_at(rhoD, theta, cfg);
    if (e.min() > 1e-12) return false;
    kind = kind_from_events(rhoD, theta, e, cfg);
    return true;
}

Phase2Trajectory integrate_phase2(const ReducedState& start, Direction dir, const GameConfig& cfg,
                                  const RetrogradeLimits& limits) {
    if (!(start.rhoD > 0.0) || !std::isfinite(start.theta))
        throw GeometryError("invalid reduced state");
    Phase2Trajectory tr;
    tr.direction = dir;
    Field field(cfg);
    Y y{start.rhoD, start.theta, 0.0};
    const double h = dir == Direction::Forward ? cfg.h_ode : -cfg.h_ode;

    TerminalKind kind{};
    const bool at_terminal = terminal_check(y.rho, y.theta, cfg, kind);

    if (dir == Direction::Forward) {
        double psi = 0.0;
        if (at_terminal) {
            tr.samples.push_back(make_sample(0.0, y, y.theta + optimal_defender_heading(start, cfg)));
            label_terminal(tr, y.rho, y.theta, kind, defender_side(events_at(y.rho, y.theta, cfg)), cfg);
            return tr;
        }
        field.eval(y, &psi);
        tr.samples.push_back(make_sample(0.0, y, psi));
        double t = 0.0;
        for (long n = 0; n < cfg.step_budget; ++n) {
            const double psi0 = field.hint();
            Y y1 = field.rk4(y, h);
            if (events_at(y1.rho, y1.theta, cfg).min() <= 0.0) {
                auto g = [&](const Y& q) { return events_at(q.rho, q.theta, cfg).min(); };
                const double s = localize(field, y, h, psi0, g, cfg);
                field.set_hint(psi0);
                y1 = field.rk4(y, s * h);
                double psi1 = 0.0;
                field.eval(y1, &psi1);
                t += s * h;
                tr.samples.push_back(make_sample(t, y1, psi1));
                const Events e = events_at(y1.rho, y1.theta, cfg);
                label_terminal(tr, y1.rho, y1.theta, kind_from_events(y1.rho, y1.theta, e, cfg), defender_side(e), cfg);
                return tr;
            }
            double psi1 = 0.0;
            field.eval(y1, &psi1);
            y = y1;
            t += h;
            tr.samples.push_back(make_sample(t, y, psi1));
        }
        throw NonTerminationError("phase-II integration exceeded the step budget");
    }

    // Retrograde.
    if (at_terminal) {
        label_terminal(tr, y.rho, y.theta, kind, defender_side(events_at(y.rho, y.theta, cfg)), cfg);
    } else {
        const Phase2Trajectory fwd = integrate_phase2(start, Direction::Forward, cfg);
        tr.terminal_kind = fwd.terminal_kind;
        tr.value = fwd.value;
        tr.margin = fwd.margin;
        tr.rhoD_f = fwd.rhoD_f;
        tr.theta_f = fwd.theta_f;
    }
    double psi = 0.0;
    field.eval(y, &psi);
    tr.samples.push_back(make_sample(0.0, y, psi));
    double t = 0.0;
    const double th = std::abs(h);
    for (long n = 0; n < cfg.step_budget; ++n) {
        const double psi0 = field.hint();
        double step = th;
        bool hit_time = false;
        if (t + th >= limits.t_max) {
            step = limits.t_max - t;
            hit_time = true;
        }
        Y y1 = field.rk4(y, -step);
        StopReason stop = StopReason::Terminal;
        if (y1.theta <= 0.0) {
            stop = StopReason::SingularSurface;
        } else if (y1.rho >= limits.rho_max) {
            stop = StopReason::RangeLimit;
        } else if (n > 0 && events_at(y1.rho, y1.theta, cfg).min() < 0.0) {
            stop = StopReason::TerminalRegion;
        }
        if (stop != StopReason::Terminal) {
            auto g = [&](const Y& q) {
                switch (stop) {
                    case StopReason::SingularSurface: return q.theta;
                    case StopReason::RangeLimit: return limits.rho_max - q.rho;
                    default: return events_at(q.rho, q.theta, cfg).min();
                }
            };
            const double s = localize(field, y, -step, psi0, g, cfg);
            field.set_hint(psi0);
            y1 = field.rk4(y, -s * step);
            if (stop == StopReason::SingularSurface) y1.theta = std::max(y1.theta, 0.0);
            double psi1 = 0.0;
            field.eval(y1, &psi1);
            t += s * step;
            tr.samples.push_back(make_sample(t, y1, psi1));
            tr.stop = stop;
            return tr;
        }
        double psi1 = 0.0;
        field.eval(y1, &psi1);
        y = y1;
        t += step;
        tr.samples.push_back(make_sample(t, y, psi1));
        if (hit_time) {
            tr.stop = StopReason::TimeLimit;
            return tr;
        }
    }
    throw NonTerminationError("retrograde integration exceeded the step budget");
}

double phase2_value(const ReducedState& rs, const GameConfig& cfg) {
    return integrate_phase2(rs, Direction::Forward, cfg).value;
}

ReducedState terminal_state_for_value(double V, const GameConfig& cfg) {
    if (!std::isfinite(V)) throw NoSolutionError("value is not finite");
    if (V == 0.0) return {cfg.r, kPi, Chirality::CounterClockwise};
    if (V > 0.0) {
        if (V > kPi) throw NoSolutionError("value above pi is not attainable");
        const double theta = kPi - V;
        return {std::max(cfg.r, rhoD_dagger(theta, cfg)), theta, Chirality::CounterClockwise};
    }
    if (V > -cfg.r) throw NoSolutionError("values in (-r, 0) label no trajectory");
    const double rho = -V;
    return {rho, theta_dagger(rho, cfg), Chirality::CounterClockwise};
}

Phase2Sample state_at(const Phase2Trajectory& traj, double t, const GameConfig& cfg) {
    if (traj.samples.empty()) throw NoSolutionError("empty trajectory");
    if (t <= traj.samples.front().t) return traj.samples.front();
    if (t >= traj.samples.back().t) return traj.samples.back();
    auto it = std::upper_bound(traj.samples.begin(), traj.samples.end(), t,
                               [](double v, const Phase2Sample& s) { return v < s.t; });
    const Phase2Sample& s0 = *(it - 1);
    const double dt = t - s0.t;
    if (dt == 0.0) return s0;
    Field field(cfg);
    field.set_hint(s0.theta + s0.phiD);
    const double h = traj.direction == Direction::Forward ? dt : -dt;
    const Y y = field.rk4({s0.rhoD, s0.theta, s0.alpha}, h);
    double psi = 0.0;
    field.eval(y, &psi);
    return make_sample(t, y, psi);
}

}  // namespace sdtd
