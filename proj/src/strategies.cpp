#include "sdtd/strategies.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>
#include <sstream>

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "sdtd/dominance.hpp"
#include "sdtd/errors.hpp"
#include "sdtd/phase2.hpp"

namespace sdtd {

namespace {

const Vec2 kTarget{0.0, 0.0};

Vec2 toward(Vec2 from, Vec2 to) {
    const Vec2 d = to - from;
    const double n = d.norm();
    return n > 0.0 ? d / n : Vec2{0.0, 0.0};
}

StrategyDecision make(Vec2 heading, PhaseLabel phase, std::string note = {}) {
    StrategyDecision d;
    d.heading = heading;
    d.phase = phase;
    d.note = std::move(note);
    return d;
}

ReducedState canonical_reduced(const GameState& s, const GameConfig& cfg) {
    ReducedState rs = reduced_coordinates(s);
    rs.chirality = singular_tiebreak(s, cfg);
    return rs;
}

// Relative defender heading on the capture circle: phiD* outside the region
// where theta can be held, the blocking heading inside it.
double defender_relative_heading(const ReducedState& rs, const GameConfig& cfg) {
    if (rs.rhoD <= rhoD_dagger(rs.theta, cfg)) return blocking_heading(rs, cfg);
    return optimal_defender_heading(rs, cfg);
}

Vec2 planar_heading(const GameState& s, const ReducedState& rs, double relative) {
    return unit(s.xD.angle() + sign(rs.chirality) * (rs.theta + relative));
}

bool in_band(const GameState& s, const GameConfig& cfg) {
    return std::abs(s.R() - cfg.r_safe()) <= manifold_band(cfg);
}

}  // namespace

std::string to_string(PhaseLabel p) {
    switch (p) {
        case PhaseLabel::I: return "I";
        case PhaseLabel::II: return "II";
        case PhaseLabel::III: return "III";
    }
    return "?";
}

double manifold_band(const GameConfig& cfg) { return std::max(cfg.tol_pos, 2.0 * cfg.dt); }

Chirality singular_tiebreak(const GameState& s, const GameConfig& cfg) {
    const ReducedState rs = reduced_coordinates(s);
    if (rs.theta <= cfg.tol_angle) return Chirality::CounterClockwise;
    return rs.chirality;
}

double blocking_heading(const ReducedState& rs, const GameConfig& cfg) {
    const double nu = cfg.nu;
    const double r = cfg.r_safe();
    auto theta_rate = [&](double psi) {
        const double phiD = psi - rs.theta;
        return -(nu / rs.rhoD) * std::sin(psi) +
               (std::sin(attacker_equilibrium_heading(phiD, cfg)) - nu * std::sin(phiD)) / r;
    };
    if (theta_rate(kPi) <= 0.0) return wrap_angle(kPi - rs.theta);
    // Admissible headings closest to pi on either side with theta-rate <= 0.
    constexpr int n = 1024;
    double best = std::numeric_limits<double>::quiet_NaN();
    for (int side = -1; side <= 1; side += 2) {
        double prev = kPi;
        for (int k = 1; k < n; ++k) {
            const double psi = kPi + side * (kPi / 2.0) * k / n;
            if (theta_rate(psi) <= 0.0) {
                double lo = prev, hi = psi;
                for (int it = 0; it < 100 && std::abs(hi - lo) > 1e-15; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (theta_rate(mid) <= 0.0)
                        hi = mid;
                    else
                        lo = mid;
                }
                if (std::isnan(best) || std::abs(hi - kPi) < std::abs(best - kPi)) best = hi;
                break;
            }
            prev = psi;
        }
    }
    if (std::isnan(best)) return optimal_defender_heading(rs, cfg);
    return wrap_angle(best - rs.theta);
}

StrategyDecision defender_security(const GameState& s, const GameConfig& cfg, const Phase1Options& opt) {
    if (s.rhoD() == 0.0) return make({0.0, 0.0}, PhaseLabel::III, "at target");
    if (s.rhoA() >= (s.rhoD() - cfg.r) / cfg.nu) return make(toward(s.xD, kTarget), PhaseLabel::III);
    if (in_attacker_dominance(kTarget, s, cfg))
        return make(toward(s.xD, kTarget), PhaseLabel::III, "target in attacker dominance");
    if (in_band(s, cfg)) {
        const ReducedState rs = canonical_reduced(s, cfg);
        StrategyDecision d = make(planar_heading(s, rs, defender_relative_heading(rs, cfg)), PhaseLabel::II);
        d.chirality = rs.chirality;
        return d;
    }
    try {
        Phase1Options o = opt;
        o.compute_value = false;
        const Phase1Solution sol = solve_phase1(s, cfg, o);
        StrategyDecision d = make(sol.heading_D, PhaseLabel::I);
        d.gamma = sol.gamma;
        d.entry = sol.entry;
        d.psi = sol.psi;
        d.chirality = sol.chirality;
        return d;
    } catch (const Error& e) {
        return make(toward(s.xD, kTarget), PhaseLabel::I, std::string("fallback: ") + e.what());
    }
}

StrategyDecision attacker_security(const GameState& s, const GameConfig& cfg, std::optional<Vec2> defender_heading,
                                   const Phase1Options& opt) {
    if (s.rhoA() == 0.0) return make({0.0, 0.0}, PhaseLabel::III, "at target");
    if (in_attacker_dominance(kTarget, s, cfg)) return make(toward(s.xA, kTarget), PhaseLabel::III);
    // The capture-circle latch comes before the defender-dominance shortcut
    // so that a losing attacker still keeps clear of the capture disk.
    if (in_band(s, cfg) && s.rhoD() > cfg.r) {
        const ReducedState rs = canonical_reduced(s, cfg);
        if (rs.rhoD >= cfg.r && rs.theta >= theta_dagger(rs.rhoD, cfg))
            return make(toward(s.xA, kTarget), PhaseLabel::III, "break free");
        const double k = sign(rs.chirality);
        const double alpha = s.xD.angle();
        Vec2 hD;
        if (defender_heading && defender_heading->norm() > 0.0)
            hD = defender_heading->normalized();
        else
            hD = planar_heading(s, rs, defender_relative_heading(rs, cfg));
        const double phiD = wrap_angle(k * (hD.angle() - alpha) - rs.theta);
        const double phiA = attacker_equilibrium_heading(phiD, cfg);
        const Vec2 ideal = unit(alpha + k * (rs.theta + phiA));

        // Step onto the capture circle around the defender's next position,
        // on the side closest to the equilibrium heading.
        const double dt = cfg.dt;
        const double rsafe = cfg.r_safe();
        const Vec2 Dn = s.xD + hD * (cfg.nu * dt);
        const Vec2 u = Dn - s.xA;
        const double d = u.norm();
        Vec2 heading = ideal;
        if (d > 0.0 && d <= dt + rsafe && d >= std::abs(rsafe - dt)) {
            const double a = (dt * dt - rsafe * rsafe + d * d) / (2.0 * d);
            const double h = std::sqrt(std::max(0.0, dt * dt - a * a));
            const Vec2 e = u / d;
            const Vec2 perp{-e.y, e.x};
            const Vec2 p1 = s.xA + e * a + perp * h;
            const Vec2 p2 = s.xA + e * a - perp * h;
            const Vec2 want = s.xA + ideal * dt;
            heading = toward(s.xA, distance(p1, want) <= distance(p2, want) ? p1 : p2);
        } else if (d > dt + rsafe) {
            heading = toward(s.xA, Dn);
        } else if (d > 0.0) {
            heading = toward(Dn, s.xA);
        }
        StrategyDecision dec = make(heading, PhaseLabel::II);
        dec.chirality = rs.chirality;
        return dec;
    }
    if (in_defender_dominance(kTarget, s, cfg))
        return make(toward(s.xA, kTarget), PhaseLabel::III, "target in defender dominance");
    try {
        Phase1Options o = opt;
        o.compute_value = false;
        const Phase1Solution sol = solve_phase1(s, cfg, o);
        StrategyDecision d = make(sol.heading_A, PhaseLabel::I);
        d.gamma = sol.gamma;
        d.entry = sol.entry;
        d.psi = sol.psi;
        d.chirality = sol.chirality;
        return d;
    } catch (const Error& e) {
        return make(toward(s.xA, kTarget), PhaseLabel::I, std::string("fallback: ") + e.what());
    }
}

StrategyDecision baseline_straight_line_defender(const GameState& s) {
    if (s.rhoD() == 0.0) return make({0.0, 0.0}, PhaseLabel::III, "hold");
    return make(toward(s.xD, kTarget), PhaseLabel::I);
}

StrategyDecision baseline_straight_line_attacker(const GameState& s) {
    if (s.rhoA() == 0.0) return make({0.0, 0.0}, PhaseLabel::III, "hold");
    return make(toward(s.xA, kTarget), PhaseLabel::I);
}

StrategyDecision baseline_pure_pursuit_defender(const GameState& s) {
    if (s.R() == 0.0) throw GeometryError("defender and attacker coincide");
    return make(toward(s.xD, s.xA), PhaseLabel::I);
}

StrategyDecision SecurityStrategy::decide(const Observation& obs, const GameConfig& cfg) {
    Phase1Options opt;
    opt.seed = seed_;
    opt.psi_hint = psi_;
    StrategyDecision d = role_ == Role::Defender ? defender_security(obs.state, cfg, opt)
                                                 : attacker_security(obs.state, cfg, obs.opponent_heading, opt);
    seed_ = d.entry;
    psi_ = d.psi;
    return d;
}

StrategyDecision StraightLineStrategy::decide(const Observation& obs, const GameConfig&) {
    return role_ == Role::Defender ? baseline_straight_line_defender(obs.state)
                                   : baseline_straight_line_attacker(obs.state);
}

StrategyDecision PurePursuitStrategy::decide(const Observation& obs, const GameConfig&) {
    return baseline_pure_pursuit_defender(obs.state);
}

ExternalStrategy::ExternalStrategy(std::string command) : command_(std::move(command)) {
    if (command_.empty()) throw ConfigError("external strategy needs a command");
    std::signal(SIGPIPE, SIG_IGN);
    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0) throw PluginError(std::string("pipe: ") + std::strerror(errno));
    if (pipe(from_child) != 0) {
        close(to_child[0]);
        close(to_child[1]);
        throw PluginError(std::string("pipe: ") + std::strerror(errno));
    }
    pid_ = fork();
    if (pid_ < 0) throw PluginError(std::string("fork: ") + std::strerror(errno));
    if (pid_ == 0) {
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    to_child_ = fdopen(to_child[1], "w");
    from_child_ = fdopen(from_child[0], "r");
    if (!to_child_ || !from_child_) throw PluginError("cannot open plugin pipes");
}

ExternalStrategy::~ExternalStrategy() {
    if (to_child_) std::fclose(to_child_);
    if (from_child_) std::fclose(from_child_);
    if (pid_ > 0) {
        int status = 0;
        if (waitpid(pid_, &status, WNOHANG) == 0) {
            kill(pid_, SIGTERM);
            waitpid(pid_, &status, 0);
        }
    }
}

StrategyDecision ExternalStrategy::decide(const Observation& obs, const GameConfig&) {
    const GameState& s = obs.state;
    if (std::fprintf(to_child_, "%.17g %.17g %.17g %.17g %.17g\n", obs.t, s.xD.x, s.xD.y, s.xA.x, s.xA.y) < 0 ||
        std::fflush(to_child_) != 0)
        throw PluginError("plugin '" + command_ + "' stopped reading its input");
    char* line = nullptr;
    std::size_t cap = 0;
    const ssize_t got = getline(&line, &cap, from_child_);
    std::string text = got > 0 ? std::string(line, static_cast<std::size_t>(got)) : std::string();
    std::free(line);
    if (got <= 0) throw PluginError("plugin '" + command_ + "' closed its output");
    std::istringstream in(text);
    double hx = 0.0, hy = 0.0;
    if (!(in >> hx >> hy) || !std::isfinite(hx) || !std::isfinite(hy))
        throw PluginError("plugin '" + command_ + "' wrote an unreadable heading: " + text);
    const Vec2 h{hx, hy};
    if (h.norm() == 0.0) throw PluginError("plugin '" + command_ + "' wrote a zero heading");
    return make(h.normalized(), PhaseLabel::I);
}

std::unique_ptr<Strategy> make_strategy(const std::string& name, Role role) {
    if (name == "proposed") return std::make_unique<SecurityStrategy>(role);
    if (name == "straight-line") return std::make_unique<StraightLineStrategy>(role);
    if (name == "pure-pursuit") {
        if (role != Role::Defender) throw ConfigError("pure-pursuit is a defender strategy");
        return std::make_unique<PurePursuitStrategy>();
    }
    const std::string prefix = "external:";
    if (name.rfind(prefix, 0) == 0) return std::make_unique<ExternalStrategy>(name.substr(prefix.size()));
    throw ConfigError("unknown strategy '" + name + "'");
}

}  // namespace sdtd
