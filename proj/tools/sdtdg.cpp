// sdtdg: command-line front end for the slow-defender target-defense solver.

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdtd/barrier.hpp"
#include "sdtd/dominance.hpp"
#include "sdtd/errors.hpp"
#include "sdtd/export.hpp"
#include "sdtd/phase1.hpp"
#include "sdtd/phase2.hpp"
#include "sdtd/simulator.hpp"
#include "sdtd/strategies.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sdtd;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitPlugin = 4;

struct Options {
    std::string scenario_file;
    double nu{0.5};
    double r{1.0};
    double eps_safe{0.0};
    double dt{1e-3};
    double tmax{0.0};
    std::string xd;
    std::string xa;
    std::string defender{"proposed"};
    std::string attacker{"proposed"};
    std::string out{"."};
    std::vector<std::string> formats;
    std::uint64_t seed{0};
    // phase2-field
    double rho_min{0.0};
    double rho_max{0.0};
    int rho_n{40};
    int theta_n{40};
    // grid
    std::string grid{"-6,6,-6,6"};
    std::string cells{"20,20"};
};

Vec2 parse_vec(const std::string& text, const char* what) {
    std::istringstream in(text);
    double x = 0.0, y = 0.0;
    char comma = 0;
    if (!(in >> x >> comma >> y) || comma != ',' || !std::isfinite(x) || !std::isfinite(y))
        throw ConfigError(std::string(what) + " must look like X,Y");
    std::string rest;
    if (in >> rest) throw ConfigError(std::string(what) + " must look like X,Y");
    return {x, y};
}

std::vector<double> parse_list(const std::string& text, std::size_t n, const char* what) {
    std::vector<double> v;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            v.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError(std::string(what) + ": bad number '" + item + "'");
        }
    }
    if (v.size() != n) throw ConfigError(std::string(what) + " needs " + std::to_string(n) + " comma-separated values");
    return v;
}

// Scenario file first, explicit flags on top.
Scenario build_scenario(const Options& o, const CLI::App& sub) {
    auto given = [&](const char* name) { return sub.get_option(name)->count() > 0; };
    Scenario s;
    if (!o.scenario_file.empty()) {
        std::ifstream in(o.scenario_file);
        if (!in) throw ConfigError("cannot read scenario file " + o.scenario_file);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ConfigError(std::string("scenario file is not valid JSON: ") + e.what());
        }
        s = scenario_from_json(j);
    }
    if (given("--nu")) s.config.nu = o.nu;
    if (given("--r")) s.config.r = o.r;
    if (given("--eps-safe")) s.config.eps_safe = o.eps_safe;
    if (given("--dt")) s.config.dt = o.dt;
    if (given("--tmax")) s.t_max = o.tmax;
    if (given("--xd")) s.xD = parse_vec(o.xd, "--xd");
    if (given("--xa")) s.xA = parse_vec(o.xa, "--xa");
    if (given("--defender")) s.defender = o.defender;
    if (given("--attacker")) s.attacker = o.attacker;
    if (given("--out")) s.out = o.out;
    if (given("--seed")) s.seed = o.seed;
    s.config.validate();
    if (s.t_max && !(*s.t_max > 0.0)) throw ConfigError("--tmax must be positive");
    return s;
}

struct Outputs {
    fs::path dir;
    std::set<std::string> formats;
    json written = json::array();

    bool want(const std::string& f) const { return formats.empty() || formats.count(f) > 0; }

    void write(const std::string& name, const std::string& content) {
        fs::create_directories(dir);
        const fs::path p = dir / name;
        std::ofstream os(p);
        if (!os) throw ConfigError("cannot write " + p.string());
        os << content;
        written.push_back(p.string());
    }
};

Outputs make_outputs(const Scenario& s, const Options& o) {
    Outputs out;
    out.dir = s.out;
    for (const auto& f : o.formats) {
        if (f != "csv" && f != "svg" && f != "json") throw ConfigError("unknown format '" + f + "'");
        out.formats.insert(f);
    }
    return out;
}

Vec2 need(const std::optional<Vec2>& v, const char* flag) {
    if (!v) throw ConfigError(std::string("missing ") + flag);
    return *v;
}

const char* kStyleRegion = "fill:#f4c7c3;fill-opacity:0.6;stroke:none";
const char* kStyleCurve = "fill:none;stroke:#1a5fb4;stroke-width:1.5";
const char* kStyleCapture = "fill:none;stroke:#555;stroke-dasharray:4 3";
const char* kStyleTarget = "fill:#000";

int cmd_oval(const Scenario& sc, Outputs& out) {
    const GameState s{need(sc.xD, "--xd"), need(sc.xA, "--xa")};
    const GameConfig& cfg = sc.config;
    const CartesianOval oval = sample_oval(s, cfg);
    const std::vector<Vec2> loop = oval.closed_polyline();

    if (out.want("csv")) {
        std::ostringstream os;
        os << "x,y,branch,phi_bar\n";
        for (const auto& o : oval.samples) os << o.point_near.x << ',' << o.point_near.y << ",near," << o.phi_bar << '\n';
        for (auto it = oval.samples.rbegin(); it != oval.samples.rend(); ++it)
            os << it->point_far.x << ',' << it->point_far.y << ",far," << it->phi_bar << '\n';
        out.write("oval.csv", os.str());
    }
    if (out.want("svg")) {
        Vec2 lo, hi;
        bounds_of({loop, {s.xA, s.xD, Vec2{0.0, 0.0}}}, lo, hi, 0.25);
        SvgDocument svg(lo, hi);
        // Attacker dominance: everything except the oval and its shadow as
        // seen from the attacker.
        svg.path({lo, {hi.x, lo.y}, hi, {lo.x, hi.y}}, true, "fill:#f9e0a8;stroke:none", "attacker-dominance");
        const double far = 4.0 * (hi - lo).norm();
        const double lam = los_angle(s);
        std::vector<Vec2> shadow;
        for (const auto& o : oval.samples) shadow.push_back(o.point_near);
        for (auto it = oval.samples.rbegin(); it != oval.samples.rend(); ++it)
            shadow.push_back(s.xA + unit(it->phi_bar + lam) * far);
        svg.path(shadow, true, "fill:#ffffff;stroke:none", "shadow");
        svg.path(loop, true, "fill:#b5d3f3;stroke:#1a5fb4;stroke-width:1.5", "oval");
        svg.circle(s.xD, cfg.r, kStyleCapture, "capture-circle");
        svg.marker({0.0, 0.0}, kStyleTarget, "target");
        svg.marker(s.xD, "fill:#1a5fb4", "defender");
        svg.marker(s.xA, "fill:#c01c28", "attacker");
        out.write("oval.svg", svg.str());
    }
    const Vec2 dir = unit(los_angle(s));
    const double ln = oval_distance(s, cfg, 0.0, OvalBranch::Near);
    const double lf = oval_distance(s, cfg, 0.0, OvalBranch::Far);
    json j;
    j["command"] = "oval";
    j["phi_bar_S"] = oval.phi_bar_S;
    j["l_near_axis"] = ln;
    j["l_far_axis"] = lf;
    j["near_point_axis"] = {(s.xA + dir * ln).x, (s.xA + dir * ln).y};
    j["far_point_axis"] = {(s.xA + dir * lf).x, (s.xA + dir * lf).y};
    j["target_in_defender_dominance"] = in_defender_dominance({0.0, 0.0}, s, cfg);
    j["target_in_attacker_dominance"] = in_attacker_dominance({0.0, 0.0}, s, cfg);
    j["blocking"] = is_blocking(s, cfg);
    j["files"] = out.written;
    j["scenario"] = to_json(sc);
    std::cout << j.dump(2) << '\n';
    return 0;
}

void draw_barrier(SvgDocument& svg, const BarrierCurve& b, const GameConfig& cfg) {
    svg.path(b.polyline, true, kStyleRegion, "attacker-region");
    svg.path(b.natural.sample(256), false, "fill:none;stroke:#26a269;stroke-width:1.5", "natural-barrier");
    svg.path(b.envelope.points, false, kStyleCurve, "envelope-ccw");
    svg.path(b.mirrored, false, kStyleCurve, "envelope-cw");
    svg.circle(b.xD, cfg.r, kStyleCapture, "capture-circle");
    svg.marker({0.0, 0.0}, kStyleTarget, "target");
    svg.marker(b.xD, "fill:#1a5fb4", "defender");
}

int cmd_barrier(const Scenario& sc, Outputs& out) {
    const Vec2 xD = need(sc.xD, "--xd");
    const GameConfig& cfg = sc.config;
    json j;
    j["command"] = "barrier";
    j["scenario"] = to_json(sc);
    if (xD.norm() <= cfg.r) {
        j["result"] = "defender-trivial-win";
        j["files"] = out.written;
        std::cout << j.dump(2) << '\n';
        return 0;
    }
    const BarrierCurve b = assemble_barrier(xD, cfg);
    j["result"] = "barrier";
    j["closed"] = b.closed;
    j["closure_gap"] = b.closure_gap;
    j["gamma_max"] = b.envelope.gamma_max;
    j["tau_max"] = b.envelope.tau_max;
    j["termination"] = to_string(b.envelope.end);
    j["natural_radius"] = b.natural.radius;
    j["natural_half_gap"] = b.natural.half_gap;
    if (!b.envelope.failure.empty()) j["failure"] = b.envelope.failure;
    j["partial"] = b.envelope.end == SweepEnd::Failed;

    if (out.want("csv")) {
        std::ostringstream os;
        write_barrier_csv(os, b);
        out.write("barrier.csv", os.str());
    }
    if (out.want("svg")) {
        Vec2 lo, hi;
        bounds_of({b.polyline, {xD}}, lo, hi);
        SvgDocument svg(lo, hi);
        draw_barrier(svg, b, cfg);
        out.write("barrier.svg", svg.str());
    }
    if (out.want("json")) {
        json side = j;
        side.erase("files");
        out.write("barrier.json", side.dump(2) + "\n");
    }
    j["files"] = out.written;
    std::cout << j.dump(2) << '\n';
    return b.envelope.end == SweepEnd::Failed ? kExitNumeric : 0;
}

int cmd_simulate(const Scenario& sc, Outputs& out) {
    const GameState s0{need(sc.xD, "--xd"), need(sc.xA, "--xa")};
    const GameConfig& cfg = sc.config;
    auto D = make_strategy(sc.defender, Role::Defender);
    auto A = make_strategy(sc.attacker, Role::Attacker);
    RunOptions opt;
    if (sc.t_max) opt.t_max = *sc.t_max;
    const Trace tr = run(s0, *D, *A, cfg, opt);

    std::ostringstream csv;
    write_trace_csv(csv, tr);
    const std::string hash = fnv1a_hex(csv.str());
    if (out.want("csv")) out.write("trace.csv", csv.str());
    if (out.want("svg")) {
        std::vector<Vec2> pd, pa;
        for (const auto& r : tr.rows) {
            pd.push_back(r.state.xD);
            pa.push_back(r.state.xA);
        }
        Vec2 lo, hi;
        bounds_of({pd, pa, {Vec2{0.0, 0.0}}}, lo, hi, 0.15);
        SvgDocument svg(lo, hi);
        if (s0.rhoD() > cfg.r) {
            try {
                const BarrierCurve b = assemble_barrier(s0.xD, cfg);
                svg.path(b.polyline, true, kStyleRegion, "initial-barrier");
            } catch (const Error&) {
            }
        }
        const std::size_t stride = std::max<std::size_t>(1, tr.rows.size() / 8);
        for (std::size_t k = 0; k < tr.rows.size(); k += stride) svg.circle(tr.rows[k].state.xD, cfg.r, kStyleCapture);
        svg.path(pd, false, "fill:none;stroke:#1a5fb4;stroke-width:1.5", "defender-path");
        svg.path(pa, false, "fill:none;stroke:#c01c28;stroke-width:1.5", "attacker-path");
        svg.marker({0.0, 0.0}, kStyleTarget, "target");
        svg.text(lo + Vec2{0.1, 0.1}, to_string(tr.outcome));
        out.write("simulate.svg", svg.str());
    }
    json j;
    j["command"] = "simulate";
    j["outcome"] = to_string(tr.outcome);
    j["t_f"] = tr.t_f;
    j["reason"] = tr.reason;
    j["rows"] = tr.rows.size();
    j["trace_hash"] = hash;
    j["scenario"] = to_json(sc);
    if (out.want("json")) out.write("simulate.json", j.dump(2) + "\n");
    j["files"] = out.written;
    std::cout << j.dump(2) << '\n';
    if (tr.outcome == Outcome::Aborted) return tr.plugin_failure ? kExitPlugin : kExitNumeric;
    return 0;
}

int cmd_classify(const Scenario& sc, Outputs&) {
    const GameState s{need(sc.xD, "--xd"), need(sc.xA, "--xa")};
    const Classification c = classify(s, sc.config);
    json j;
    j["command"] = "classify";
    j["region"] = to_string(c.region);
    j["reason"] = c.reason;
    j["phase"] = c.phase;
    j["V"] = c.has_value ? json(c.V) : json(nullptr);
    j["margin"] = c.has_value ? json(c.margin) : json(nullptr);
    j["gamma"] = c.has_value ? json(c.gamma) : json(nullptr);
    j["scenario"] = to_json(sc);
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_phase2_field(const Scenario& sc, const Options& o, Outputs& out) {
    const GameConfig& cfg = sc.config;
    const double rho_min = o.rho_min > 0.0 ? o.rho_min : cfg.r;
    const double rho_max = o.rho_max > 0.0 ? o.rho_max : 4.0 * cfg.r;
    if (!(rho_max > rho_min) || rho_min < cfg.r) throw ConfigError("need r <= rho-min < rho-max");
    if (o.rho_n < 2 || o.theta_n < 2) throw ConfigError("grid needs at least two points per axis");

    struct Cell {
        double rho, theta, V{std::nan("")}, margin{std::nan("")};
        std::string kind{"failed"};
    };
    std::vector<Cell> cells;
    for (int i = 0; i < o.rho_n; ++i)
        for (int k = 0; k < o.theta_n; ++k)
            cells.push_back({rho_min + (rho_max - rho_min) * i / (o.rho_n - 1), kPi * k / (o.theta_n - 1)});
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (std::size_t k = next++; k < cells.size(); k = next++) {
            try {
                const Phase2Trajectory tr =
                    integrate_phase2({cells[k].rho, cells[k].theta, Chirality::CounterClockwise}, Direction::Forward, cfg);
                cells[k].V = tr.value;
                cells[k].margin = tr.margin;
                cells[k].kind = to_string(tr.terminal_kind);
            } catch (const Error&) {
            }
        }
    };
    const int nt = std::max(1, worker_count());
    std::vector<std::thread> pool;
    for (int k = 1; k < nt; ++k) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    std::size_t failed = 0;
    for (const auto& c : cells) failed += c.kind == "failed";

    RetrogradeLimits lim;
    lim.rho_max = rho_max;
    const Phase2Trajectory sep = integrate_phase2({cfg.r, kPi, Chirality::CounterClockwise}, Direction::Retrograde, cfg, lim);

    if (out.want("csv")) {
        std::ostringstream os;
        os << "rhoD,theta,V,margin,kind\n";
        for (const auto& c : cells) os << c.rho << ',' << c.theta << ',' << c.V << ',' << c.margin << ',' << c.kind << '\n';
        out.write("phase2_field.csv", os.str());
        std::ostringstream ss;
        ss << "rhoD,theta\n";
        for (const auto& p : sep.samples) ss << p.rhoD << ',' << p.theta << '\n';
        out.write("separatrix.csv", ss.str());
    }
    if (out.want("svg")) {
        // theta on the horizontal axis, rhoD vertical.
        SvgDocument svg({-0.1, rho_min - 0.1}, {kPi + 0.1, rho_max + 0.1}, 480.0);
        std::vector<Vec2> s_pts, d_pts, t_pts;
        for (const auto& p : sep.samples) s_pts.push_back({p.theta, p.rhoD});
        for (int k = 0; k <= 200; ++k) {
            const double th = kPi * k / 200.0;
            const double rd = rhoD_dagger(th, cfg);
            if (rd >= rho_min && rd <= rho_max) d_pts.push_back({th, rd});
        }
        for (int k = 0; k <= 200; ++k) {
            const double rho = rho_min + (rho_max - rho_min) * k / 200.0;
            t_pts.push_back({theta_dagger(rho, cfg), rho});
        }
        svg.path(s_pts, false, kStyleCurve, "separatrix");
        svg.path(d_pts, false, "fill:none;stroke:#26a269;stroke-width:1.2", "rho-dagger");
        svg.path(t_pts, false, "fill:none;stroke:#c01c28;stroke-width:1.2", "theta-dagger");
        out.write("phase2_field.svg", svg.str());
    }
    json j;
    j["command"] = "phase2-field";
    j["cells"] = cells.size();
    j["failed"] = failed;
    j["separatrix_points"] = sep.samples.size();
    j["scenario"] = to_json(sc);
    j["files"] = out.written;
    std::cout << j.dump(2) << '\n';
    return failed * 100 > cells.size() ? kExitNumeric : 0;
}

int cmd_grid(const Scenario& sc, const Options& o, Outputs& out) {
    const Vec2 xD = need(sc.xD, "--xd");
    const auto g = parse_list(o.grid, 4, "--grid");
    const auto n = parse_list(o.cells, 2, "--cells");
    GridSpec spec{g[0], g[1], g[2], g[3], static_cast<int>(n[0]), static_cast<int>(n[1])};
    // Fail early on unknown names.
    make_strategy(sc.defender, Role::Defender);
    make_strategy(sc.attacker, Role::Attacker);
    const auto cells = outcome_grid(
        xD, spec, [&] { return make_strategy(sc.defender, Role::Defender); },
        [&] { return make_strategy(sc.attacker, Role::Attacker); }, sc.config);
    std::ostringstream os;
    write_grid_csv(os, cells);
    if (out.want("csv")) out.write("grid.csv", os.str());
    std::size_t dw = 0, aw = 0, other = 0;
    for (const auto& c : cells) {
        if (c.outcome == Outcome::DefenderWin) ++dw;
        else if (c.outcome == Outcome::AttackerWin) ++aw;
        else ++other;
    }
    json j;
    j["command"] = "grid";
    j["defender_wins"] = dw;
    j["attacker_wins"] = aw;
    j["other"] = other;
    j["scenario"] = to_json(sc);
    j["files"] = out.written;
    std::cout << j.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Slow-defender target-defense game: dominance regions, barrier, classification and simulation"};
    app.footer(
        "Exit codes: 0 ok, 2 invalid configuration, 3 numerical or geometry failure, 4 strategy plugin failure.\n"
        "Strategies: proposed, straight-line, pure-pursuit (defender), external:<command>.\n"
        "External strategies read 't xD_x xD_y xA_x xA_y' lines on stdin and answer 'hx hy' per line.\n"
        "SDTDG_THREADS caps the number of worker threads.");
    app.require_subcommand(1);

    Options o;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", o.scenario_file, "scenario JSON file; flags override its fields");
        sub->add_option("--nu", o.nu, "defender/attacker speed ratio in (0,1)");
        sub->add_option("--r", o.r, "capture radius");
        sub->add_option("--eps-safe", o.eps_safe, "extra separation buffer");
        sub->add_option("--xd", o.xd, "defender position X,Y");
        sub->add_option("--xa", o.xa, "attacker position X,Y");
        sub->add_option("--dt", o.dt, "simulation step");
        sub->add_option("--tmax", o.tmax, "simulation horizon");
        sub->add_option("--defender", o.defender, "defender strategy");
        sub->add_option("--attacker", o.attacker, "attacker strategy");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--format", o.formats, "output formats: csv, svg, json (default: all)")->delimiter(',');
        sub->add_option("--seed", o.seed, "recorded in outputs; all strategies are deterministic");
    };

    auto* oval = app.add_subcommand("oval", "defender dominance oval and attacker dominance region");
    auto* barrier = app.add_subcommand("barrier", "barrier around the attacker-win region for a defender position");
    auto* simulate = app.add_subcommand("simulate", "run a game with the chosen strategies");
    auto* field = app.add_subcommand("phase2-field", "value field on the capture circle and its separatrix");
    auto* cls = app.add_subcommand("classify", "winner of an initial state");
    auto* grid = app.add_subcommand("grid", "simulated outcome over a lattice of attacker starts");
    for (auto* sub : {oval, barrier, simulate, field, cls, grid}) add_common(sub);
    field->add_option("--rho-min", o.rho_min, "smallest defender range (default r)");
    field->add_option("--rho-max", o.rho_max, "largest defender range (default 4r)");
    field->add_option("--rho-n", o.rho_n, "range samples");
    field->add_option("--theta-n", o.theta_n, "angle samples");
    grid->add_option("--grid", o.grid, "attacker lattice bounds xmin,xmax,ymin,ymax");
    grid->add_option("--cells", o.cells, "lattice size nx,ny");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        const Scenario sc = build_scenario(o, *sub);
        Outputs out = make_outputs(sc, o);
        if (oval->parsed()) return cmd_oval(sc, out);
        if (barrier->parsed()) return cmd_barrier(sc, out);
        if (simulate->parsed()) return cmd_simulate(sc, out);
        if (field->parsed()) return cmd_phase2_field(sc, o, out);
        if (cls->parsed()) return cmd_classify(sc, out);
        if (grid->parsed()) return cmd_grid(sc, o, out);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n' << app.help() << '\n';
        return kExitConfig;
    } catch (const PluginError& e) {
        std::cerr << "plugin error: " << e.what() << '\n';
        return kExitPlugin;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}
