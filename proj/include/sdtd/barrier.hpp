#pragma once

#include <string>
#include <vector>

#include "sdtd/geometry.hpp"

namespace sdtd {

/// Circle around the target on which the target sits on the boundary of the
/// defender's dominance region. Only the part with angle(A, T, D) at least
/// arccos(nu) belongs to the barrier.
struct NaturalArc {
    double radius{0.0};
    double defender_angle{0.0};
    double half_gap{0.0};  ///< excluded wedge half-angle around the defender

    double start_angle() const { return defender_angle + half_gap; }
    double end_angle() const { return defender_angle + 2.0 * kPi - half_gap; }
    Vec2 point(double angle) const { return unit(angle) * radius; }
    std::vector<Vec2> sample(int n) const;
};

NaturalArc natural_barrier(Vec2 xD, const GameConfig& cfg);

enum class SweepEnd { CaptureCircle, SymmetryAxis, SingularSurface, Failed };

std::string to_string(SweepEnd e);

/// Counter-clockwise half of a level set, swept along the time to go of the
/// Phase-II entry.
struct SweepArc {
    std::vector<Vec2> points;
    std::vector<double> gamma;
    std::vector<double> tau;
    double gamma_max{0.0};
    double tau_max{0.0};
    SweepEnd end{SweepEnd::Failed};
    std::string failure;
};

SweepArc sweep_level_set(double V0, Vec2 xD, const GameConfig& cfg, int n = 256);

/// Counter-clockwise envelope arc of the zero level set.
SweepArc envelope_barrier(Vec2 xD, const GameConfig& cfg, int n = 256);

/// Level set V = V0 with both halves: the mirrored half reversed, then the
/// counter-clockwise half.
std::vector<Vec2> level_set(double V0, Vec2 xD, const GameConfig& cfg, int n = 256);

struct BarrierCurve {
    Vec2 xD;
    NaturalArc natural;
    SweepArc envelope;           ///< counter-clockwise envelope
    std::vector<Vec2> mirrored;  ///< clockwise envelope, same order as envelope
    std::vector<Vec2> capture_arc;
    std::vector<Vec2> polyline;  ///< closed loop, counter-clockwise around the attacker region
    std::vector<std::string> labels;
    double closure_gap{0.0};
    bool closed{false};

    /// Winding-number containment in the attacker-win region.
    bool contains(Vec2 p) const;
};

BarrierCurve assemble_barrier(Vec2 xD, const GameConfig& cfg, int n_envelope = 256, int n_arc = 256);

int winding_number(const std::vector<Vec2>& loop, Vec2 p);

enum class Region { AttackerWin, DefenderWin, OnBarrier };

std::string to_string(Region r);

struct Classification {
    Region region{Region::DefenderWin};
    std::string reason;
    std::string phase;  ///< "I", "II" or "III"
    double V{0.0};
    double margin{0.0};
    double gamma{0.0};
    bool has_value{false};
};

Classification classify(const GameState& s, const GameConfig& cfg);

}  // namespace sdtd
