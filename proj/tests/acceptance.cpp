// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "sdtd/barrier.hpp"
#include "sdtd/dominance.hpp"
#include "sdtd/errors.hpp"
#include "sdtd/phase1.hpp"
#include "sdtd/phase2.hpp"
#include "sdtd/simulator.hpp"
#include "sdtd/strategies.hpp"

using namespace sdtd;

namespace {

GameConfig with_nu(double nu) {
    GameConfig c;
    c.nu = nu;
    return c;
}

struct Result {
    bool pass{false};
    std::string detail;
};

int failures = 0;

void report(const char* id, const char* title, double limit_s, const std::function<Result()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
        r = body();
    } catch (const std::exception& e) {
        r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > limit_s) {
        r.pass = false;
        r.detail += " (over the time limit)";
    }
    if (!r.pass) ++failures;
    std::printf("criterion %-2s %s  %s  [%.2f s of %.0f s]  %s\n", id, r.pass ? "PASS" : "FAIL", title, secs, limit_s,
                r.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

// Points 2% inside and outside the assembled barrier, taken radially from
// the natural and envelope pieces.
struct Probe {
    Vec2 p;
    bool inner;
};

std::vector<Probe> barrier_probes(const BarrierCurve& b, int per_side) {
    std::vector<Vec2> base;
    for (std::size_t k = 0; k < b.polyline.size(); ++k)
        if (b.labels[k] != "capture") base.push_back(b.polyline[k]);
    std::vector<Probe> out;
    for (int i = 0; i < per_side; ++i) {
        const Vec2 q = base[(2 * i + 1) * base.size() / (2 * per_side)];
        out.push_back({q * 0.98, true});
        out.push_back({q * 1.02, false});
    }
    return out;
}

}  // namespace

int main() {
    std::printf("acceptance run\n");

    report("1", "closed-form anchors", 1.0, [] {
        double worst = 0.0;
        for (double nu : {0.3, 0.5, 0.75}) {
            const GameConfig cfg = with_nu(nu);
            worst = std::max(worst, std::abs(theta_dagger(cfg.r, cfg) - kPi));
            worst = std::max(worst, std::abs(rhoD_dagger(0.0, cfg) - nu * cfg.r / (1 - nu)));
            for (double R : {1.5, 2.0, 3.0, 5.0}) {
                const GameState s{{R + 1.0, 0.0}, {1.0, 0.0}};
                worst = std::max(worst, std::abs(oval_distance(s, cfg, 0.0, OvalBranch::Near) - (R - cfg.r) / (1 + nu)));
                worst = std::max(worst, std::abs(oval_distance(s, cfg, 0.0, OvalBranch::Far) - (R + cfg.r) / (1 - nu)));
            }
            worst = std::max(worst, std::abs(phi_bar_max({{2.0, 0.0}, {2.0 + cfg.r, 0.0}}, cfg) - std::acos(-nu)));
        }
        return Result{worst <= 1e-9, fmt("max error %.2e", worst)};
    });

    report("2", "fixed point of the rhoD dagger boundary", 1.0, [] {
        double worst = 0.0;
        for (double nu : {0.3, 0.5, 0.75}) {
            const GameConfig cfg = with_nu(nu);
            for (int k = 0; k < 100; ++k) {
                const double th = kPi * k / 99.0;
                const double rd = rhoD_dagger(th, cfg);
                worst = std::max(worst, std::abs(nu * rhoA_on_circle(rd, th, cfg.r) - rd));
            }
        }
        return Result{worst <= 1e-8, fmt("max error %.2e", worst)};
    });

    report("3", "barrier corner from the V=0 trajectory", 30.0, [] {
        double worst = 0.0;
        std::size_t n = 0;
        int wrong_kind = 0;
        // the scenario speed ratio; other ratios are covered by the unit suite
        {
            const GameConfig cfg = with_nu(0.75);
            RetrogradeLimits lim;
            lim.rho_max = 6.0;
            const Phase2Trajectory sep = integrate_phase2({cfg.r, kPi}, Direction::Retrograde, cfg, lim);
            for (const auto& s : sep.samples) {
                const Phase2Trajectory f = integrate_phase2({s.rhoD, s.theta}, Direction::Forward, cfg);
                worst = std::max(worst, std::abs(f.value));
                wrong_kind += f.terminal_kind != TerminalKind::BarrierCorner && std::abs(f.value) > 1e-4;
                ++n;
            }
        }
        return Result{worst <= 1e-4 && wrong_kind == 0,
                      fmt("%.0f samples, max |V| %.2e", double(n), worst)};
    });

    const GameConfig scen = with_nu(0.75);
    const GameState s6{{3.5, 0.0}, {4.3021, 1.5550}};

    report("4", "scenario reproduction, solve_phase1", 60.0, [&] {
        const Phase1Solution sol = solve_phase1(s6, scen);
        const bool v = std::abs(sol.V) <= 1e-3;
        const bool hd = std::abs(sol.heading_D.x + 0.95) <= 0.02 && std::abs(sol.heading_D.y - 0.30) <= 0.02;
        const bool ha = std::abs(sol.heading_A.x + 1.0) <= 0.02 && std::abs(sol.heading_A.y) <= 0.02;
        std::ostringstream os;
        os << "V " << sol.V << ", defender (" << sol.heading_D.x << ", " << sol.heading_D.y << "), attacker ("
           << sol.heading_A.x << ", " << sol.heading_A.y << "); target in defender dominance: "
           << (in_defender_dominance({0, 0}, s6, scen) ? "yes" : "no");
        return Result{v && hd && ha, os.str()};
    });

    report("5", "barrier non-penetration", 600.0, [&] {
        const NonPenetrationReport rep = barrier_nonpenetration_sweep(s6, 0.4, 360, scen);
        const auto& sp = rep.security_probe;
        const bool sec = sp.error.empty() && sp.has_value && std::abs(sp.V) <= 1e-3 && sp.region == "on-barrier";
        std::ostringstream os;
        os << rep.probes.size() << " probes, " << rep.attacker_wins << " attacker-win, " << rep.failures
           << " failed; security probe " << sp.region << " V ";
        if (sp.has_value)
            os << sp.V;
        else
            os << "n/a (decided by dominance)";
        return Result{rep.attacker_wins == 0 && rep.failures == 0 && sec, os.str()};
    });

    report("6", "strategy comparison", 120.0, [] {
        const GameConfig cfg = with_nu(0.75);
        const GameState s0{{6.0, 0.0}, {6.97, 0.25}};
        SecurityStrategy D1(Role::Defender), A1(Role::Attacker);
        const Trace a = run(s0, D1, A1, cfg);
        StraightLineStrategy D2(Role::Defender);
        SecurityStrategy A2(Role::Attacker);
        const Trace b = run(s0, D2, A2, cfg);
        std::ostringstream os;
        os << "proposed: " << to_string(a.outcome) << " at " << a.t_f << "; straight-line: " << to_string(b.outcome)
           << " at " << b.t_f << " (" << b.reason << ")";
        return Result{a.outcome == Outcome::DefenderWin && b.outcome == Outcome::AttackerWin, os.str()};
    });

    std::vector<std::pair<double, Vec2>> cases{{0.5, {3, 0}}, {0.5, {4, 0}}, {0.75, {3, 0}}, {0.75, {4, 0}}};

    report("7", "barrier/simulation cross-validation", 900.0, [&] {
        int total = 0, agree = 0, outside_band = 0;
        std::ostringstream os;
        for (const auto& [nu, xD] : cases) {
            const GameConfig cfg = with_nu(nu);
            const BarrierCurve b = assemble_barrier(xD, cfg);
            for (const Probe& pr : barrier_probes(b, 20)) {
                const GameState s{xD, pr.p};
                const Classification c = classify(s, cfg);
                SecurityStrategy D(Role::Defender), A(Role::Attacker);
                const Trace tr = run(s, D, A, cfg);
                const bool sim_attacker = tr.outcome == Outcome::AttackerWin;
                const bool cls_attacker = c.region == Region::AttackerWin;
                ++total;
                if (sim_attacker == cls_attacker && c.region != Region::OnBarrier) {
                    ++agree;
                } else if (!(c.has_value && std::abs(c.V) <= 1e-3)) {
                    ++outside_band;
                    os << " [nu " << nu << " xD (" << xD.x << "," << xD.y << ") xA (" << pr.p.x << "," << pr.p.y
                       << ") " << to_string(c.region) << " vs " << to_string(tr.outcome) << "]";
                }
            }
        }
        const double rate = double(agree) / total;
        return Result{rate >= 0.95 && outside_band == 0,
                      fmt("%.0f/%.0f agree (%.1f%%), %.0f disagreements outside the band", agree, total, 100 * rate,
                          outside_band) +
                          os.str()};
    });

    report("8", "geometry properties", 600.0, [&] {
        double gap = 0.0;
        for (double nu : {0.3, 0.5, 0.75})
            for (double rho : {2.0, 3.0, 4.0, 6.0}) gap = std::max(gap, assemble_barrier({rho, 0.0}, with_nu(nu)).closure_gap);
        double rot = 0.0;
        for (const auto& [nu, xD] : cases) {
            const BarrierCurve a = assemble_barrier(xD, with_nu(nu));
            for (double g : {0.7, -2.1}) {
                const BarrierCurve b = assemble_barrier(rotate(xD, g), with_nu(nu));
                if (a.polyline.size() != b.polyline.size()) {
                    rot = std::numeric_limits<double>::infinity();
                    continue;
                }
                for (std::size_t k = 0; k < a.polyline.size(); ++k)
                    rot = std::max(rot, distance(rotate(a.polyline[k], g), b.polyline[k]));
            }
        }
        int nest_checked = 0, nest_bad = 0;
        for (Vec2 xD : {Vec2{3, 0}, Vec2{4, 0}}) {
            const BarrierCurve slow = assemble_barrier(xD, with_nu(0.5));
            const BarrierCurve fast = assemble_barrier(xD, with_nu(0.75));
            for (const BarrierCurve* src : {&slow, &fast})
                for (const Probe& pr : barrier_probes(*src, 20)) {
                    if (!fast.contains(pr.p)) continue;
                    ++nest_checked;
                    nest_bad += !slow.contains(pr.p);
                }
        }
        const GameConfig cfg;
        return Result{gap <= 10 * cfg.tol_pos && rot <= cfg.tol_pos && nest_bad == 0,
                      fmt("closure gap %.2e, rotation error %.2e, nesting %.0f/%.0f contained", gap, rot,
                          nest_checked - nest_bad, nest_checked)};
    });

    std::printf("%d criterion/criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
