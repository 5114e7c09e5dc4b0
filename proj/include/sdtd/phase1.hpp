#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "sdtd/geometry.hpp"
#include "sdtd/phase2.hpp"

namespace sdtd {

/// Planar sample of an embedded Phase-II trajectory.
struct EmbeddedSample {
    double tau;  ///< time to go until the terminal state
    Vec2 xD;
    Vec2 vD;     ///< defender velocity, norm nu
    Vec2 xA;
    Vec2 vA;     ///< attacker velocity, unit norm
};

/// Phase-II trajectory of value V placed in the plane, terminal defender at
/// polar angle gamma. Samples run from the terminal state backward in time.
struct EmbeddedPhase2 {
    double V{0.0};
    double gamma{0.0};
    Chirality chirality{Chirality::CounterClockwise};
    std::shared_ptr<const Phase2Trajectory> reduced;  ///< retrograde trajectory
    std::vector<EmbeddedSample> samples;

    double duration() const { return samples.empty() ? 0.0 : samples.back().tau; }
};

/// Planar sample at time to go tau (dense, between stored samples).
EmbeddedSample embedded_at(const EmbeddedPhase2& e, double tau, const GameConfig& cfg);

/// Retrograde trajectory for value V, cached per (V, configuration, range).
std::shared_ptr<const Phase2Trajectory> retrograde_for_value(double V, const GameConfig& cfg, double rho_max);

EmbeddedPhase2 embed_phase2(double V, double gamma, const GameConfig& cfg, double rho_max,
                            Chirality chirality = Chirality::CounterClockwise);

struct TangentEntry {
    Vec2 xD_entry;
    double tau_II{0.0};
    double residual{0.0};  ///< angle between the tangent and the entry direction
};

/// Point of the defender's Phase-II path whose tangent passes through xD,
/// scanning from the far end of the path toward the terminal state.
TangentEntry tangent_entry(Vec2 xD, const EmbeddedPhase2& traj, const GameConfig& cfg);

/// Attacker start whose straight run meets the trajectory (V, gamma) at the
/// defender's tangent entry.
Vec2 attacker_locus(double V, double gamma, Vec2 xD, const GameConfig& cfg,
                    Chirality chirality = Chirality::CounterClockwise);

/// Entry of a Phase-I run into Phase II, expressed in the frame where the
/// defender starts at (rho0, 0) and the attacker is counter-clockwise.
struct EntryImage {
    Vec2 xA_start;  ///< attacker start that reaches the entry on time
    Vec2 xD_entry;
    Vec2 xA_entry;
    Vec2 vD;        ///< defender velocity, norm nu
    Vec2 vA;        ///< attacker velocity, unit norm
    double tau_I{0.0};
    double beta{0.0};  ///< polar angle of the defender at entry
    double psi{0.0};   ///< reduced defender heading theta + phiD at entry
};

/// Maps a Phase-II entry state (rhoD, theta) to the Phase-I start of the
/// attacker for a defender starting at range rho0. Requires rhoD <= rho0.
EntryImage entry_image(double rhoD, double theta, double rho0, const GameConfig& cfg,
                       std::optional<double> psi_hint = std::nullopt);

struct Phase1Solution {
    double V{0.0};
    double margin{0.0};  ///< continuous value margin of the Phase-II part
    TerminalKind terminal_kind{TerminalKind::BarrierCorner};
    double gamma{0.0};
    Chirality chirality{Chirality::CounterClockwise};
    ReducedState entry;
    Vec2 xD_entry;
    Vec2 xA_entry;
    Vec2 vA_entry;
    double tau_I{0.0};
    double tau_II{0.0};
    Vec2 heading_D;
    Vec2 heading_A;
    double residual{0.0};
    int alternatives{0};  ///< other converged solutions that were not selected
    double psi{0.0};      ///< reduced defender heading at entry, reusable as a hint
};

struct Phase1Options {
    /// Previous entry state; when set, a local refinement is tried first.
    std::optional<ReducedState> seed;
    std::optional<double> psi_hint;
    bool compute_value{true};
    int grid{64};
    int max_iterations{50};
};

/// Finds the Phase-II entry matching the attacker position. Throws
/// NoSolutionError when no entry reproduces xA within 10 tol_pos.
Phase1Solution solve_phase1(const GameState& s, const GameConfig& cfg, const Phase1Options& opt = {});

}  // namespace sdtd
