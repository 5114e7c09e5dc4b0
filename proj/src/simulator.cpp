#include "sdtd/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "sdtd/barrier.hpp"
#include "sdtd/dominance.hpp"
#include "sdtd/errors.hpp"

namespace sdtd {

namespace {

// Smallest u in [0, 1] with |p0 + u (p1 - p0)| <= radius, or -1.
double first_entry(Vec2 p0, Vec2 p1, double radius) {
    if (p0.norm() <= radius) return 0.0;
    const Vec2 d = p1 - p0;
    const double a = dot(d, d);
    if (a == 0.0) return -1.0;
    const double b = 2.0 * dot(p0, d);
    const double c = dot(p0, p0) - radius * radius;
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return -1.0;
    const double u = (-b - std::sqrt(disc)) / (2.0 * a);
    return u >= 0.0 && u <= 1.0 ? u : -1.0;
}

TraceRow make_row(double t, const GameState& s, const GameConfig& cfg, bool with_phase) {
    TraceRow row;
    row.t = t;
    row.state = s;
    row.phase = with_phase ? phase_of(s, cfg) : PhaseLabel::I;
    row.R = s.R();
    row.rhoD = s.rhoD();
    row.rhoA = s.rhoA();
    return row;
}

}  // namespace

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::DefenderWin: return "defender-win";
        case Outcome::AttackerWin: return "attacker-win";
        case Outcome::Timeout: return "timeout";
        case Outcome::Aborted: return "aborted";
    }
    return "unknown";
}

double default_t_max(const GameState& s0, const GameConfig& cfg) {
    return 10.0 * (s0.rhoA() + kPi * s0.rhoD()) / std::min(cfg.nu, 1.0 - cfg.nu);
}

double default_tol_reach(const GameState& s0) { return 1e-3 * std::max(1.0, s0.rhoA()); }

PhaseLabel phase_of(const GameState& s, const GameConfig& cfg) {
    const Vec2 target{0.0, 0.0};
    if (s.R() > 0.0 && (in_defender_dominance(target, s, cfg) || in_attacker_dominance(target, s, cfg)))
        return PhaseLabel::III;
    if (std::abs(s.R() - cfg.r_safe()) <= manifold_band(cfg)) return PhaseLabel::II;
    return PhaseLabel::I;
}

GameState step(const GameState& s, Vec2 heading_D, Vec2 heading_A, const GameConfig& cfg) {
    return {s.xD + heading_D * (cfg.nu * cfg.dt), s.xA + heading_A * cfg.dt};
}

Trace run(const GameState& s0, Strategy& defender, Strategy& attacker, const GameConfig& cfg, const RunOptions& opt) {
    cfg.validate();
    const double t_max = std::isnan(opt.t_max) ? default_t_max(s0, cfg) : opt.t_max;
    const double tol_reach = std::isnan(opt.tol_reach) ? default_tol_reach(s0) : opt.tol_reach;
    const double capture = cfg.r - cfg.tol_pos;

    Trace tr;
    auto finish = [&](double t, const GameState& s, Outcome o, const char* reason) {
        tr.rows.push_back(make_row(t, s, cfg, opt.record_phase));
        tr.outcome = o;
        tr.t_f = t;
        tr.reason = reason;
        return tr;
    };
    if (s0.R() < capture) return finish(0.0, s0, Outcome::DefenderWin, "capture");
    if (s0.rhoD() <= cfg.r) return finish(0.0, s0, Outcome::DefenderWin, "target-guarded");
    if (s0.rhoA() <= tol_reach) return finish(0.0, s0, Outcome::AttackerWin, "target-reached");

    GameState s = s0;
    double t = 0.0;
    std::optional<Vec2> last_D;
    std::optional<Vec2> last_A;
    for (long n = 0;; ++n) {
        tr.rows.push_back(make_row(t, s, cfg, opt.record_phase));
        Vec2 hD, hA;
        try {
            hD = defender.decide({t, s, last_A}, cfg).heading;
            hA = attacker.decide({t, s, last_D}, cfg).heading;
        } catch (const Error& e) {
            tr.outcome = Outcome::Aborted;
            tr.t_f = t;
            tr.reason = e.what();
            tr.plugin_failure = dynamic_cast<const PluginError*>(&e) != nullptr;
            return tr;
        }
        last_D = hD;
        last_A = hA;
        const GameState s1 = step(s, hD, hA, cfg);

        // Earliest terminal event inside the step; ties go to the defender.
        const double u_cap = first_entry(s.xA - s.xD, s1.xA - s1.xD, capture);
        const double u_def = first_entry(s.xD, s1.xD, cfg.r);
        const double u_att = first_entry(s.xA, s1.xA, tol_reach);
        double u_best = 2.0;
        Outcome o = Outcome::Timeout;
        const char* reason = "";
        if (u_cap >= 0.0 && u_cap < u_best) { u_best = u_cap; o = Outcome::DefenderWin; reason = "capture"; }
        if (u_def >= 0.0 && u_def < u_best) { u_best = u_def; o = Outcome::DefenderWin; reason = "target-guarded"; }
        if (u_att >= 0.0 && u_att < u_best) { u_best = u_att; o = Outcome::AttackerWin; reason = "target-reached"; }
        if (u_best <= 1.0) {
            // The terminal row must come strictly after the last regular row.
            const double u = std::max(u_best, 1e-9);
            const GameState sf{s.xD + (s1.xD - s.xD) * u, s.xA + (s1.xA - s.xA) * u};
            return finish(t + u * cfg.dt, sf, o, reason);
        }
        s = s1;
        t = (n + 1) * cfg.dt;
        if (t > t_max) return finish(t, s, Outcome::Timeout, "timeout");
    }
}

NonPenetrationReport barrier_nonpenetration_sweep(const GameState& s0, double dt_probe, int n_headings,
                                                  const GameConfig& cfg) {
    if (n_headings <= 0 || !(dt_probe > 0.0)) throw ConfigError("probe count and duration must be positive");
    NonPenetrationReport rep;
    const StrategyDecision dd = defender_security(s0, cfg);
    const Vec2 xD1 = s0.xD + dd.heading * (cfg.nu * dt_probe);
    auto probe = [&](double angle, Vec2 heading) {
        ProbeResult p;
        p.heading_angle = angle;
        p.state = {xD1, s0.xA + heading * dt_probe};
        try {
            const Classification c = classify(p.state, cfg);
            p.region = to_string(c.region);
            p.has_value = c.has_value;
            p.V = c.V;
            p.margin = c.has_value ? c.margin : (c.region == Region::AttackerWin ? -cfg.r : kPi);
        } catch (const Error& e) {
            p.error = e.what();
        }
        return p;
    };
    for (int k = 0; k < n_headings; ++k) {
        const double a = 2.0 * kPi * k / n_headings;
        ProbeResult p = probe(a, unit(a));
        if (!p.error.empty())
            ++rep.failures;
        else {
            if (p.region == "attacker-win") ++rep.attacker_wins;
            rep.min_abs_margin = std::min(rep.min_abs_margin, std::abs(p.margin));
        }
        rep.probes.push_back(std::move(p));
    }
    const StrategyDecision da = attacker_security(s0, cfg, dd.heading);
    rep.security_probe = probe(da.heading.angle(), da.heading);
    return rep;
}

int worker_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("SDTDG_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) return std::min(cap, hw);
    }
    return hw;
}

std::vector<GridCell> outcome_grid(Vec2 xD, const GridSpec& grid, const StrategyFactory& defender,
                                   const StrategyFactory& attacker, const GameConfig& cfg, int threads) {
    if (grid.nx < 1 || grid.ny < 1) throw ConfigError("grid needs at least one cell per axis");
    const std::size_t n = static_cast<std::size_t>(grid.nx) * grid.ny;
    std::vector<GridCell> cells(n);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const double fx = grid.nx == 1 ? 0.5 : static_cast<double>(i) / (grid.nx - 1);
            const double fy = grid.ny == 1 ? 0.5 : static_cast<double>(j) / (grid.ny - 1);
            cells[j * grid.nx + i].xA = {grid.x_min + fx * (grid.x_max - grid.x_min),
                                         grid.y_min + fy * (grid.y_max - grid.y_min)};
        }
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (std::size_t k = next++; k < n; k = next++) {
            GridCell& c = cells[k];
            try {
                auto d = defender();
                auto a = attacker();
                const Trace tr = run({xD, c.xA}, *d, *a, cfg);
                c.outcome = tr.outcome;
                c.t_f = tr.t_f;
                if (tr.outcome == Outcome::Aborted) c.error = tr.reason;
            } catch (const std::exception& e) {
                c.outcome = Outcome::Aborted;
                c.error = e.what();
            }
        }
    };
    const int nt = std::max(1, std::min<int>(threads > 0 ? threads : worker_count(), static_cast<int>(n)));
    std::vector<std::thread> pool;
    for (int k = 1; k < nt; ++k) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    return cells;
}

}  // namespace sdtd
