#include "sdtd/barrier.hpp"

#include <algorithm>
#include <cmath>

#include "sdtd/dominance.hpp"
#include "sdtd/errors.hpp"
#include "sdtd/phase1.hpp"
#include "sdtd/phase2.hpp"

namespace sdtd {

namespace {

struct LocusPoint {
    Vec2 p;       // attacker start, defender-local frame
    double gamma;
};

LocusPoint locus_at(const Phase2Trajectory& traj, double tau, double rho0, const GameConfig& cfg) {
    const Phase2Sample s = state_at(traj, tau, cfg);
    const EntryImage img = entry_image(s.rhoD, s.theta, rho0, cfg, s.theta + s.phiD);
    // The reduced trajectory keeps alpha = 0 at the terminal state, so the
    // forward turn from this entry to the terminal state is -alpha.
    return {img.xA_start, wrap_angle(img.beta - s.alpha)};
}

Vec2 mirror_about(Vec2 p, double axis_angle) { return rotate(mirror_x(rotate(p, -axis_angle)), axis_angle); }

}  // namespace

std::vector<Vec2> NaturalArc::sample(int n) const {
    std::vector<Vec2> out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) out.push_back(point(start_angle() + (end_angle() - start_angle()) * k / (n - 1)));
    return out;
}

NaturalArc natural_barrier(Vec2 xD, const GameConfig& cfg) {
    const double rho0 = xD.norm();
    if (rho0 <= cfg.r) throw GeometryError("defender already within capture reach of the target");
    return {(rho0 - cfg.r) / cfg.nu, xD.angle(), std::acos(cfg.nu)};
}

std::string to_string(SweepEnd e) {
    switch (e) {
        case SweepEnd::CaptureCircle: return "capture-circle";
        case SweepEnd::SymmetryAxis: return "symmetry-axis";
        case SweepEnd::SingularSurface: return "singular-surface";
        case SweepEnd::Failed: return "failed";
    }
    return "unknown";
}

SweepArc sweep_level_set(double V0, Vec2 xD, const GameConfig& cfg, int n) {
    if (n < 2) throw ConfigError("sweep needs at least two samples");
    const double rho0 = xD.norm();
    if (rho0 <= cfg.r) throw GeometryError("defender already within capture reach of the target");
    const double a = xD.angle();
    const Vec2 D0{rho0, 0.0};
    const double rs = cfg.r_safe();
    const auto traj = retrograde_for_value(V0, cfg, rho0);
    const double tau_end = traj->duration();

    SweepArc arc;
    auto push = [&](double tau, const LocusPoint& lp) {
        arc.points.push_back(rotate(lp.p, a));
        arc.gamma.push_back(lp.gamma);
        arc.tau.push_back(tau);
    };
    auto g_cap = [&](const LocusPoint& lp) { return distance(lp.p, D0) - rs; };
    auto g_axis = [&](const LocusPoint& lp) { return lp.p.y; };

    try {
        LocusPoint prev = locus_at(*traj, 0.0, rho0, cfg);
        push(0.0, prev);
        double prev_tau = 0.0;
        for (int k = 1; k < n; ++k) {
            const double tau = tau_end * k / (n - 1);
            const LocusPoint cur = locus_at(*traj, tau, rho0, cfg);
            const bool cap = g_cap(cur) < -10.0 * cfg.tol_pos;
            const bool axis = g_axis(cur) < 0.0;
            if (cap || axis) {
                // Earliest of the two events inside (prev_tau, tau).
                auto g = [&](const LocusPoint& lp) { return std::min(g_cap(lp), g_axis(lp)); };
                double lo = prev_tau, hi = tau;
                for (int it = 0; it < 100 && hi - lo > 1e-14; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (g(locus_at(*traj, mid, rho0, cfg)) > 0.0)
                        lo = mid;
                    else
                        hi = mid;
                }
                LocusPoint end = locus_at(*traj, hi, rho0, cfg);
                arc.end = g_axis(end) <= g_cap(end) ? SweepEnd::SymmetryAxis : SweepEnd::CaptureCircle;
                if (arc.end == SweepEnd::SymmetryAxis) end.p.y = 0.0;
                push(hi, end);
                break;
            }
            push(tau, cur);
            prev_tau = tau;
            if (k == n - 1) {
                if (std::abs(g_cap(cur)) <= 10.0 * cfg.tol_pos)
                    arc.end = SweepEnd::CaptureCircle;
                else if (traj->stop == StopReason::SingularSurface)
                    arc.end = SweepEnd::SingularSurface;
                else {
                    arc.end = SweepEnd::Failed;
                    arc.failure = "sweep ended without reaching a termination condition";
                }
            }
        }
    } catch (const Error& e) {
        arc.end = SweepEnd::Failed;
        arc.failure = e.what();
    }
    arc.gamma_max = arc.gamma.empty() ? 0.0 : arc.gamma.back();
    arc.tau_max = arc.tau.empty() ? 0.0 : arc.tau.back();
    return arc;
}

SweepArc envelope_barrier(Vec2 xD, const GameConfig& cfg, int n) { return sweep_level_set(0.0, xD, cfg, n); }

std::vector<Vec2> level_set(double V0, Vec2 xD, const GameConfig& cfg, int n) {
    const SweepArc arc = sweep_level_set(V0, xD, cfg, n);
    if (arc.end == SweepEnd::Failed) throw NumericalError("level-set sweep failed: " + arc.failure);
    const double a = xD.angle();
    std::vector<Vec2> out;
    out.reserve(2 * arc.points.size());
    for (auto it = arc.points.rbegin(); it != arc.points.rend(); ++it) out.push_back(mirror_about(*it, a));
    for (const auto& p : arc.points) out.push_back(p);
    return out;
}

int winding_number(const std::vector<Vec2>& loop, Vec2 p) {
    int wn = 0;
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = loop[i];
        const Vec2 b = loop[(i + 1) % n];
        const double side = cross(b - a, p - a);
        if (a.y <= p.y) {
            if (b.y > p.y && side > 0.0) ++wn;
        } else {
            if (b.y <= p.y && side < 0.0) --wn;
        }
    }
    return wn;
}

bool BarrierCurve::contains(Vec2 p) const { return winding_number(polyline, p) != 0; }

BarrierCurve assemble_barrier(Vec2 xD, const GameConfig& cfg, int n_envelope, int n_arc) {
    BarrierCurve b;
    b.xD = xD;
    b.natural = natural_barrier(xD, cfg);
    b.envelope = envelope_barrier(xD, cfg, n_envelope);
    const double a = xD.angle();
    for (const auto& p : b.envelope.points) b.mirrored.push_back(mirror_about(p, a));

    auto add = [&](Vec2 p, const char* label) {
        b.polyline.push_back(p);
        b.labels.emplace_back(label);
    };
    const auto nat = b.natural.sample(n_arc);
    for (const auto& p : nat) add(p, "natural");
    if (b.envelope.points.empty()) {
        b.closure_gap = distance(nat.back(), nat.front());
        b.closed = false;
        return b;
    }
    double gap = distance(nat.back(), b.mirrored.front());
    for (const auto& p : b.mirrored) add(p, "envelope-cw");
    if (b.envelope.end == SweepEnd::CaptureCircle) {
        const double rs = cfg.r_safe();
        const double lo = (rotate(b.mirrored.back() - xD, -a)).angle();
        const double hi = (rotate(b.envelope.points.back() - xD, -a)).angle() - 2.0 * kPi;
        for (int k = 0; k < n_arc; ++k) {
            const double phi = lo + (hi - lo) * k / (n_arc - 1);
            const Vec2 p = xD + rotate(unit(phi), a) * rs;
            b.capture_arc.push_back(p);
            add(p, "capture");
        }
        gap = std::max(gap, distance(b.mirrored.back(), b.capture_arc.front()));
        gap = std::max(gap, distance(b.capture_arc.back(), b.envelope.points.back()));
    } else {
        gap = std::max(gap, distance(b.mirrored.back(), b.envelope.points.back()));
    }
    for (auto it = b.envelope.points.rbegin(); it != b.envelope.points.rend(); ++it) add(*it, "envelope-ccw");
    gap = std::max(gap, distance(b.envelope.points.front(), nat.front()));
    b.closure_gap = gap;
    b.closed = b.envelope.end != SweepEnd::Failed && gap <= 10.0 * cfg.tol_pos;
    return b;
}

std::string to_string(Region r) {
    switch (r) {
        case Region::AttackerWin: return "attacker-win";
        case Region::DefenderWin: return "defender-win";
        case Region::OnBarrier: return "on-barrier";
    }
    return "unknown";
}

Classification classify(const GameState& s, const GameConfig& cfg) {
    Classification c;
    auto decided = [&](Region r, const char* reason, const char* phase) {
        c.region = r;
        c.reason = reason;
        c.phase = phase;
        return c;
    };
    const double rs = cfg.r_safe();
    if (s.R() < rs - cfg.tol_pos) return decided(Region::DefenderWin, "capture", "III");
    if (s.rhoA() == 0.0) return decided(Region::AttackerWin, "target-reached", "III");
    if (s.rhoD() <= cfg.r) return decided(Region::DefenderWin, "target-guarded", "III");
    // The natural barrier is exactly the boundary of target membership in the
    // defender's dominance region.
    if (s.rhoA() >= (s.rhoD() - cfg.r) / cfg.nu) return decided(Region::DefenderWin, "natural-barrier", "III");
    if (in_attacker_dominance({0.0, 0.0}, s, cfg)) return decided(Region::AttackerWin, "dominance", "III");
    if (in_defender_dominance({0.0, 0.0}, s, cfg)) return decided(Region::DefenderWin, "dominance", "III");

    auto from_margin = [&](double V, double margin, double gamma, const char* reason, const char* phase) {
        c.V = V;
        c.margin = margin;
        c.gamma = gamma;
        c.has_value = true;
        const Region r = std::abs(margin) <= cfg.tol_value ? Region::OnBarrier
                         : margin > 0.0                   ? Region::DefenderWin
                                                          : Region::AttackerWin;
        return decided(r, reason, phase);
    };

    if (std::abs(s.R() - rs) <= cfg.tol_pos) {
        const ReducedState rsd = reduced_coordinates(s);
        const Phase2Trajectory tr = integrate_phase2(rsd, Direction::Forward, cfg);
        const double gamma = sign(rsd.chirality) * tr.samples.back().alpha;
        return from_margin(tr.value, tr.margin, gamma, "phase2", "II");
    }
    try {
        const Phase1Solution sol = solve_phase1(s, cfg);
        return from_margin(sol.V, sol.margin, sol.gamma, "phase1", "I");
    } catch (const NoSolutionError&) {
        const BarrierCurve b = assemble_barrier(s.xD, cfg);
        if (!b.closed) throw;
        return decided(b.contains(s.xA) ? Region::AttackerWin : Region::DefenderWin, "barrier-fallback", "I");
    }
}

}  // namespace sdtd
