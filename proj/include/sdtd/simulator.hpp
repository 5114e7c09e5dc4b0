#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "sdtd/geometry.hpp"
#include "sdtd/strategies.hpp"

namespace sdtd {

enum class Outcome { DefenderWin, AttackerWin, Timeout, Aborted };

std::string to_string(Outcome o);

struct TraceRow {
    double t{0.0};
    GameState state;
    PhaseLabel phase{PhaseLabel::I};
    double R{0.0};
    double rhoD{0.0};
    double rhoA{0.0};
};

struct Trace {
    std::vector<TraceRow> rows;  ///< the last row is the terminal state
    Outcome outcome{Outcome::Timeout};
    double t_f{0.0};
    std::string reason;  ///< capture, target-guarded, target-reached, timeout or the abort message
    bool plugin_failure{false};
};

struct RunOptions {
    double t_max{std::numeric_limits<double>::quiet_NaN()};      ///< NaN selects the default
    double tol_reach{std::numeric_limits<double>::quiet_NaN()};  ///< NaN selects the default
    bool record_phase{true};
};

double default_t_max(const GameState& s0, const GameConfig& cfg);
double default_tol_reach(const GameState& s0);

/// Phase of a state: III once the target lies in a dominance region, II on
/// the capture circle band, I otherwise.
PhaseLabel phase_of(const GameState& s, const GameConfig& cfg);

GameState step(const GameState& s, Vec2 heading_D, Vec2 heading_A, const GameConfig& cfg);

Trace run(const GameState& s0, Strategy& defender, Strategy& attacker, const GameConfig& cfg,
          const RunOptions& opt = {});

struct ProbeResult {
    double heading_angle{0.0};
    GameState state;
    std::string region;
    bool has_value{false};  ///< false when classify decided without solving Phase I
    double V{0.0};
    double margin{0.0};
    std::string error;
};

struct NonPenetrationReport {
    std::vector<ProbeResult> probes;
    ProbeResult security_probe;  ///< attacker moving along its security heading
    int attacker_wins{0};
    int failures{0};
    double min_abs_margin{std::numeric_limits<double>::infinity()};
};

/// Advances the defender along its security heading for dt_probe and the
/// attacker along each of n_headings directions, then classifies each result.
NonPenetrationReport barrier_nonpenetration_sweep(const GameState& s0, double dt_probe, int n_headings,
                                                  const GameConfig& cfg);

struct GridSpec {
    double x_min{0.0};
    double x_max{1.0};
    double y_min{0.0};
    double y_max{1.0};
    int nx{10};
    int ny{10};
};

struct GridCell {
    Vec2 xA;
    Outcome outcome{Outcome::Timeout};
    double t_f{0.0};
    std::string error;
};

using StrategyFactory = std::function<std::unique_ptr<Strategy>()>;

/// Worker count from SDTDG_THREADS, capped by the hardware.
int worker_count();

/// Runs one rollout per lattice cell; cells are ordered row by row in y.
std::vector<GridCell> outcome_grid(Vec2 xD, const GridSpec& grid, const StrategyFactory& defender,
                                   const StrategyFactory& attacker, const GameConfig& cfg, int threads = 0);

}  // namespace sdtd
