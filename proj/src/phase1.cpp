#include "sdtd/phase1.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "sdtd/errors.hpp"

namespace sdtd {

namespace {

Vec2 apply_chirality(Vec2 v, Chirality c) { return c == Chirality::CounterClockwise ? v : mirror_x(v); }

EmbeddedSample embed_sample(const Phase2Sample& s, double gamma, const GameConfig& cfg) {
    const double a = gamma + s.alpha;
    const double phiA = attacker_equilibrium_heading(s.phiD, cfg);
    EmbeddedSample e;
    e.tau = s.t;
    e.xD = unit(a) * s.rhoD;
    e.xA = e.xD + unit(a + s.theta) * cfg.r_safe();
    e.vD = unit(a + s.theta + s.phiD) * cfg.nu;
    e.vA = unit(a + s.theta + phiA);
    return e;
}

EmbeddedSample mirrored(EmbeddedSample e, Chirality c) {
    e.xD = apply_chirality(e.xD, c);
    e.xA = apply_chirality(e.xA, c);
    e.vD = apply_chirality(e.vD, c);
    e.vA = apply_chirality(e.vA, c);
    return e;
}

// Minimum separation over the straight Phase-I runs.
double phase1_min_separation(Vec2 xD0, Vec2 xA0, Vec2 vD, Vec2 vA, double tau) {
    const Vec2 d0 = xA0 - xD0;
    const Vec2 w = vA - vD;
    const double ww = dot(w, w);
    double t = ww > 0.0 ? -dot(d0, w) / ww : 0.0;
    t = std::clamp(t, 0.0, tau);
    return (d0 + w * t).norm();
}

struct Candidate {
    double rho;
    double theta;
    double res;
};

}  // namespace

EmbeddedSample embedded_at(const EmbeddedPhase2& e, double tau, const GameConfig& cfg) {
    const Phase2Sample s = state_at(*e.reduced, tau, cfg);
    return mirrored(embed_sample(s, e.gamma, cfg), e.chirality);
}

std::shared_ptr<const Phase2Trajectory> retrograde_for_value(double V, const GameConfig& cfg, double rho_max) {
    using Key = std::tuple<double, double, double, double, double, double>;
    static std::mutex mu;
    static std::map<Key, std::shared_ptr<const Phase2Trajectory>> cache;
    const Key key{V, cfg.nu, cfg.r, cfg.eps_safe, cfg.h_ode, rho_max};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const ReducedState term = terminal_state_for_value(V, cfg);
    RetrogradeLimits lim;
    lim.rho_max = rho_max;
    auto traj = std::make_shared<Phase2Trajectory>(integrate_phase2(term, Direction::Retrograde, cfg, lim));
    if (traj->samples.size() < 3)
        throw NoSolutionError("no Phase-II trajectory ends at the terminal state of this value");
    std::lock_guard<std::mutex> lock(mu);
    if (cache.size() > 256) cache.clear();
    cache.emplace(key, traj);
    return traj;
}

EmbeddedPhase2 embed_phase2(double V, double gamma, const GameConfig& cfg, double rho_max, Chirality chirality) {
    EmbeddedPhase2 e;
    e.V = V;
    e.gamma = gamma;
    e.chirality = chirality;
    e.reduced = retrograde_for_value(V, cfg, rho_max);
    e.samples.reserve(e.reduced->samples.size());
    for (const auto& s : e.reduced->samples) e.samples.push_back(mirrored(embed_sample(s, gamma, cfg), chirality));
    return e;
}

TangentEntry tangent_entry(Vec2 xD, const EmbeddedPhase2& traj, const GameConfig& cfg) {
    const auto& S = traj.samples;
    if (S.empty()) throw NoSolutionError("empty trajectory");
    auto f = [&](const EmbeddedSample& e) { return cross(e.vD, e.xD - xD); };
    auto ahead = [&](const EmbeddedSample& e) { return dot(e.xD - xD, e.vD) >= 0.0; };
    for (std::size_t k = S.size() - 1; k > 0; --k) {
        if (distance(S[k].xD, xD) <= cfg.tol_pos) return {S[k].xD, S[k].tau, 0.0};
        // defender already on the path between two samples
        if (segment_distance(xD, S[k - 1].xD, S[k].xD) <= cfg.tol_pos) {
            const double u = segment_closest_parameter(xD, S[k - 1].xD, S[k].xD);
            const EmbeddedSample e = embedded_at(traj, S[k - 1].tau + u * (S[k].tau - S[k - 1].tau), cfg);
            return {e.xD, e.tau, 0.0};
        }
        const double f1 = f(S[k]);
        const double f0 = f(S[k - 1]);
        if (f1 == 0.0 && ahead(S[k])) return {S[k].xD, S[k].tau, 0.0};
        if ((f1 < 0.0) == (f0 < 0.0) || !ahead(S[k]) || !ahead(S[k - 1])) continue;
        double lo = S[k - 1].tau;
        double hi = S[k].tau;
        double flo = f0;
        for (int it = 0; it < 80 && hi - lo > 1e-14; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = f(embedded_at(traj, mid, cfg));
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        const EmbeddedSample e = embedded_at(traj, 0.5 * (lo + hi), cfg);
        const Vec2 d = e.xD - xD;
        const double res = d.norm() > 0.0 ? std::abs(std::asin(std::clamp(cross(e.vD, d) / (cfg.nu * d.norm()), -1.0, 1.0))) : 0.0;
        return {e.xD, e.tau, res};
    }
    throw NoSolutionError("no tangent from the defender position to the Phase-II path");
}

Vec2 attacker_locus(double V, double gamma, Vec2 xD, const GameConfig& cfg, Chirality chirality) {
    const double rho0 = xD.norm();
    if (rho0 <= cfg.r) throw GeometryError("defender already within capture reach of the target");
    const double a = xD.angle();
    const EmbeddedPhase2 emb = embed_phase2(V, gamma, cfg, rho0, chirality);
    const Vec2 xD_local{rho0, 0.0};
    const TangentEntry te = tangent_entry(xD_local, emb, cfg);
    const EmbeddedSample e = embedded_at(emb, te.tau_II, cfg);
    const double tau_I = distance(e.xD, xD_local) / cfg.nu;
    return rotate(e.xA - e.vA * tau_I, a);
}

EntryImage entry_image(double rhoD, double theta, double rho0, const GameConfig& cfg, std::optional<double> psi_hint) {
    if (rhoD > rho0 * (1.0 + 1e-12)) throw NoSolutionError("entry range beyond the defender start");
    const ReducedState rs{rhoD, theta, Chirality::CounterClockwise};
    const double phiD = psi_hint ? optimal_defender_heading(rs, cfg, *psi_hint) : optimal_defender_heading(rs, cfg);
    const double psi = theta + phiD;
    const double phiA = attacker_equilibrium_heading(phiD, cfg);
    const Vec2 D{rhoD, 0.0};
    const Vec2 A = D + unit(theta) * cfg.r_safe();
    const Vec2 T = unit(psi);
    const double dT = rhoD * std::cos(psi);
    const double disc = std::max(0.0, dT * dT + rho0 * rho0 - rhoD * rhoD);
    const double lambda = std::max(0.0, dT + std::sqrt(disc));
    const Vec2 X = D - T * lambda;
    const double beta = -X.angle();
    EntryImage img;
    img.xD_entry = rotate(D, beta);
    img.xA_entry = rotate(A, beta);
    img.vD = rotate(T, beta) * cfg.nu;
    img.vA = rotate(unit(theta + phiA), beta);
    img.tau_I = lambda / cfg.nu;
    img.beta = beta;
    img.psi = psi;
    img.xA_start = img.xA_entry - img.vA * img.tau_I;
    return img;
}

Phase1Solution solve_phase1(const GameState& s, const GameConfig& cfg, const Phase1Options& opt) {
    const double rho0 = s.rhoD();
    const double rs = cfg.r_safe();
    if (rho0 <= cfg.r) throw GeometryError("defender already within capture reach of the target");
    if (s.R() < rs - cfg.tol_pos) throw GeometryError("attacker within the capture disk");

    const double a = s.xD.angle();
    Vec2 A0 = rotate(s.xA, -a);
    const Chirality chir = A0.y < 0.0 ? Chirality::Clockwise : Chirality::CounterClockwise;
    A0 = apply_chirality(A0, chir);
    auto to_world = [&](Vec2 v) { return rotate(apply_chirality(v, chir), a); };

    const double rho_lo = std::min(rs, rho0);
    double hint = kPi;
    bool have_hint = false;
    if (opt.psi_hint) {
        hint = *opt.psi_hint;
        have_hint = true;
    }
    auto image = [&](double rho, double th) {
        EntryImage img = have_hint ? entry_image(rho, th, rho0, cfg, hint) : entry_image(rho, th, rho0, cfg);
        return img;
    };
    auto residual_vec = [&](double rho, double th, double* psi = nullptr) {
        const EntryImage img = image(rho, th);
        if (psi) *psi = img.psi;
        return img.xA_start - A0;
    };
    auto clamp_u = [&](double& rho, double& th) {
        rho = std::clamp(rho, rho_lo, rho0);
        th = std::clamp(th, 0.0, kPi);
    };

    // Damped Gauss-Newton from one start; returns the final residual norm.
    auto refine = [&](double& rho, double& th) {
        double psi = 0.0;
        Vec2 F = residual_vec(rho, th, &psi);
        hint = psi;
        have_hint = true;
        double fn = F.norm();
        const double hr = 1e-7 * std::max(1.0, rho0);
        const double ht = 1e-7;
        for (int it = 0; it < opt.max_iterations && fn > 1e-3 * cfg.tol_pos; ++it) {
            const double r1 = std::min(rho + hr, rho0), r0 = std::max(rho - hr, rho_lo);
            const double t1 = std::min(th + ht, kPi), t0 = std::max(th - ht, 0.0);
            const Vec2 Jr = (residual_vec(r1, th) - residual_vec(r0, th)) / (r1 - r0);
            const Vec2 Jt = (residual_vec(rho, t1) - residual_vec(rho, t0)) / (t1 - t0);
            const double det = Jr.x * Jt.y - Jt.x * Jr.y;
            double dr, dth;
            if (std::abs(det) > 1e-14) {
                dr = -(Jt.y * F.x - Jt.x * F.y) / det;
                dth = -(-Jr.y * F.x + Jr.x * F.y) / det;
            } else {
                dr = -(Jr.x * F.x + Jr.y * F.y);
                dth = -(Jt.x * F.x + Jt.y * F.y);
            }
            double step = 1.0;
            bool improved = false;
            for (int k = 0; k < 30; ++k, step *= 0.5) {
                double nr = rho + step * dr, nt = th + step * dth;
                clamp_u(nr, nt);
                double npsi = 0.0;
                const Vec2 nF = residual_vec(nr, nt, &npsi);
                if (nF.norm() < fn) {
                    rho = nr;
                    th = nt;
                    F = nF;
                    fn = nF.norm();
                    hint = npsi;
                    improved = true;
                    break;
                }
            }
            if (!improved) break;
        }
        return fn;
    };

    const double accept = 10.0 * cfg.tol_pos;
    std::vector<Candidate> found;
    bool from_seed = false;

    if (opt.seed) {
        double rho = std::clamp(opt.seed->rhoD, rho_lo, rho0);
        double th = std::clamp(opt.seed->theta, 0.0, kPi);
        const double res = refine(rho, th);
        if (res <= accept) {
            found.push_back({rho, th, res});
            from_seed = true;
        }
    }

    if (!from_seed) {
        have_hint = false;
        const int n = std::max(opt.grid, 4);
        std::vector<double> grid(static_cast<std::size_t>(n * n));
        auto rho_at = [&](int i) { return rho_lo + (rho0 - rho_lo) * i / (n - 1); };
        auto th_at = [&](int j) { return kPi * j / (n - 1); };
        // Each row starts with a full heading search and warm-starts along theta.
        for (int i = 0; i < n; ++i) {
            have_hint = false;
            for (int j = 0; j < n; ++j) {
                double psi = 0.0;
                grid[i * n + j] = residual_vec(rho_at(i), th_at(j), &psi).norm();
                hint = psi;
                have_hint = true;
            }
        }
        std::vector<Candidate> starts;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double v = grid[i * n + j];
                bool is_min = true;
                for (int di = -1; di <= 1 && is_min; ++di)
                    for (int dj = -1; dj <= 1; ++dj) {
                        const int ii = i + di, jj = j + dj;
                        if ((di || dj) && ii >= 0 && ii < n && jj >= 0 && jj < n && grid[ii * n + jj] < v) {
                            is_min = false;
                            break;
                        }
                    }
                if (is_min) starts.push_back({rho_at(i), th_at(j), v});
            }
        }
        std::sort(starts.begin(), starts.end(), [](const Candidate& x, const Candidate& y) { return x.res < y.res; });
        if (starts.size() > 6) starts.resize(6);
        for (auto c : starts) {
            have_hint = false;
            const double res = refine(c.rho, c.theta);
            if (res > accept) continue;
            bool dup = false;
            for (const auto& f : found)
                if (std::abs(f.rho - c.rho) < 1e-6 && std::abs(f.theta - c.theta) < 1e-6) dup = true;
            if (!dup) found.push_back({c.rho, c.theta, res});
        }
    }

    // Drop entries whose straight runs would cross the capture disk early.
    std::vector<std::pair<Candidate, EntryImage>> valid;
    for (const auto& c : found) {
        have_hint = false;
        const EntryImage img = image(c.rho, c.theta);
        const Vec2 D0{rho0, 0.0};
        if (phase1_min_separation(D0, img.xA_start, img.vD, img.vA, img.tau_I) < rs - accept) continue;
        valid.emplace_back(c, img);
    }
    if (valid.empty()) throw NoSolutionError("no Phase-II entry reproduces the attacker position");
    // residuals at rounding level are ties; the earliest entry wins those
    const double tie = 1e-3 * cfg.tol_pos;
    std::sort(valid.begin(), valid.end(), [tie](const auto& x, const auto& y) {
        if (std::abs(x.first.res - y.first.res) > tie) return x.first.res < y.first.res;
        return x.second.tau_I < y.second.tau_I;
    });

    const Candidate& best = valid.front().first;
    const EntryImage& img = valid.front().second;
    Phase1Solution sol;
    sol.chirality = chir;
    sol.entry = {best.rho, best.theta, chir};
    sol.residual = best.res;
    sol.alternatives = static_cast<int>(valid.size()) - 1;
    sol.xD_entry = to_world(img.xD_entry);
    sol.xA_entry = to_world(img.xA_entry);
    sol.vA_entry = to_world(img.vA);
    sol.tau_I = img.tau_I;
    sol.psi = img.psi;
    const Vec2 dD = img.xD_entry - Vec2{rho0, 0.0};
    sol.heading_D = dD.norm() > 1e-12 ? to_world(dD.normalized()) : to_world(img.vD / cfg.nu);
    sol.heading_A = to_world(img.vA);
    if (opt.compute_value) {
        const Phase2Trajectory fwd =
            integrate_phase2({best.rho, best.theta, Chirality::CounterClockwise}, Direction::Forward, cfg);
        sol.V = fwd.value;
        sol.margin = fwd.margin;
        sol.terminal_kind = fwd.terminal_kind;
        sol.tau_II = fwd.duration();
        sol.gamma = sign(chir) * wrap_angle(img.beta + fwd.samples.back().alpha);
    } else {
        sol.gamma = sign(chir) * wrap_angle(img.beta);
    }
    return sol;
}

}  // namespace sdtd
