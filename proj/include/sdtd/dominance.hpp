#pragma once

#include <vector>

#include "sdtd/geometry.hpp"

namespace sdtd {

enum class OvalBranch { Near, Far };

/// One sample of the oval boundary seen from the attacker.
struct OvalSample {
    double phi_bar;
    double l_near;
    double l_far;
    Vec2 point_near;
    Vec2 point_far;
};

struct CartesianOval {
    GameState state;
    GameConfig config;
    double phi_bar_S{0.0};
    std::vector<OvalSample> samples;  ///< ascending phi_bar

    /// Near branch ascending, then far branch descending.
    std::vector<Vec2> closed_polyline() const;
};

/// ||p - xD|| - r - nu ||p - xA||; non-positive inside the defender region.
double defender_margin(Vec2 p, const GameState& s, const GameConfig& cfg);

double phi_bar_max(const GameState& s, const GameConfig& cfg);

/// Distance from the attacker to the oval along relative angle phi_bar.
double oval_distance(const GameState& s, const GameConfig& cfg, double phi_bar, OvalBranch branch);

Vec2 oval_point(const GameState& s, const GameConfig& cfg, double phi_bar, OvalBranch branch);

CartesianOval sample_oval(const GameState& s, const GameConfig& cfg, int n_per_branch = 512);

bool in_defender_dominance(Vec2 p, const GameState& s, const GameConfig& cfg);

/// True iff the closed segment from xA to p stays outside the defender region.
bool in_attacker_dominance(Vec2 p, const GameState& s, const GameConfig& cfg);

/// True iff the target lies in neither dominance region.
bool is_blocking(const GameState& s, const GameConfig& cfg);

/// Angle at the target between the attacker and the defender.
double angle_ATD(const GameState& s);

}  // namespace sdtd
