#pragma once

#include <limits>
#include <string>
#include <vector>

#include "sdtd/geometry.hpp"

namespace sdtd {

/// Headings relative to the reduced frame: the defender moves along
/// polar angle alpha + theta + phiD, the attacker along alpha + theta + phiA.
struct Phase2Controls {
    double phiD{0.0};
    double phiA{0.0};
};

struct Phase2Rates {
    double d_rhoD{0.0};
    double d_theta{0.0};
};

Phase2Rates reduced_dynamics(const ReducedState& rs, const Phase2Controls& u, const GameConfig& cfg);

/// sign(phiD) * arccos(nu cos phiD), +arccos(nu) at phiD = 0.
double attacker_constrained_heading(double phiD, const GameConfig& cfg);

/// Attacker reply that keeps R fixed and turns theta upward (the branch
/// used in the counter-clockwise canonical frame).
double attacker_equilibrium_heading(double phiD, const GameConfig& cfg);

double rhoD_dagger(double theta, const GameConfig& cfg);
double theta_dagger(double rhoD, const GameConfig& cfg);

/// theta-rate over rho-rate for defender heading phiD and the attacker's
/// equilibrium reply.
double slope_objective(const ReducedState& rs, double phiD, const GameConfig& cfg);

/// Defender heading that makes the reduced trajectory approach the target
/// with the least increase of theta per unit range closed. Only headings with
/// a strictly decreasing defender range are admissible.
double optimal_defender_heading(const ReducedState& rs, const GameConfig& cfg);

/// Same optimum, searched first near a previous solution. The hint is the
/// absolute reduced heading theta + phiD. Falls back to the full search.
double optimal_defender_heading(const ReducedState& rs, const GameConfig& cfg, double psi_hint);

enum class TerminalKind { DefenderWin, AttackerWin, BarrierCorner };
enum class Direction { Forward, Retrograde };

/// Why a retrograde integration stopped.
enum class StopReason { Terminal, RangeLimit, SingularSurface, TerminalRegion, TimeLimit };

std::string to_string(TerminalKind k);
std::string to_string(StopReason k);

struct Phase2Sample {
    double t{0.0};      ///< elapsed time in the integration direction
    double rhoD{0.0};
    double theta{0.0};
    double alpha{0.0};  ///< defender polar angle, canonical frame, 0 at the start
    double phiD{0.0};
};

struct Phase2Trajectory {
    Direction direction{Direction::Forward};
    std::vector<Phase2Sample> samples;
    TerminalKind terminal_kind{TerminalKind::BarrierCorner};
    double value{0.0};   ///< pi - theta_f for a defender win, -rho_f for an attacker win
    double margin{0.0};  ///< pi - theta_f or r - rho_f; continuous across the barrier
    double rhoD_f{0.0};
    double theta_f{0.0};
    StopReason stop{StopReason::Terminal};

    double duration() const { return samples.empty() ? 0.0 : samples.back().t; }
};

struct RetrogradeLimits {
    double rho_max{std::numeric_limits<double>::infinity()};
    double t_max{std::numeric_limits<double>::infinity()};
};

/// Forward: integrate to the first terminal surface. Retrograde: integrate
/// backward from a terminal state until a limit, the singular surface theta = 0
/// or re-entry into a terminal region. The value fields of a retrograde
/// trajectory describe the terminal state it starts from.
Phase2Trajectory integrate_phase2(const ReducedState& start, Direction dir, const GameConfig& cfg,
                                  const RetrogradeLimits& limits = {});

double phase2_value(const ReducedState& rs, const GameConfig& cfg);

/// Terminal state labeled by V. Throws NoSolutionError for unattainable V.
ReducedState terminal_state_for_value(double V, const GameConfig& cfg);

/// State at time t of the trajectory, one partial integration step from the
/// nearest earlier sample.
Phase2Sample state_at(const Phase2Trajectory& traj, double t, const GameConfig& cfg);

/// Terminal classification of a state already on or past a terminal surface.
/// Returns false when the state is interior.
bool terminal_check(double rhoD, double theta, const GameConfig& cfg, TerminalKind& kind);

}  // namespace sdtd
