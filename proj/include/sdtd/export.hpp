#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdtd/barrier.hpp"
#include "sdtd/geometry.hpp"
#include "sdtd/simulator.hpp"

namespace sdtd {

/// Everything needed to reproduce one CLI invocation.
struct Scenario {
    GameConfig config;
    std::optional<Vec2> xD;
    std::optional<Vec2> xA;
    std::optional<double> t_max;
    std::string defender{"proposed"};
    std::string attacker{"proposed"};
    std::string out{"."};
    std::uint64_t seed{0};
};

nlohmann::json to_json(const Scenario& s);
/// Fields missing from j keep the values already in base.
Scenario scenario_from_json(const nlohmann::json& j, Scenario base = {});

void write_trace_csv(std::ostream& os, const Trace& tr);
void write_grid_csv(std::ostream& os, const std::vector<GridCell>& cells);
void write_barrier_csv(std::ostream& os, const BarrierCurve& b);

/// FNV-1a hash of a string, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

/// Minimal SVG writer in world coordinates (y up).
class SvgDocument {
public:
    SvgDocument(Vec2 lo, Vec2 hi, double width_px = 640.0);

    void path(const std::vector<Vec2>& pts, bool closed, const std::string& style, const std::string& id = {});
    void circle(Vec2 center, double radius, const std::string& style, const std::string& id = {});
    void marker(Vec2 p, const std::string& style, const std::string& id = {});
    void text(Vec2 p, const std::string& s);
    std::string str() const;

private:
    double sx(double x) const;
    double sy(double y) const;
    Vec2 lo_;
    Vec2 hi_;
    double scale_;
    std::vector<std::string> body_;
};

/// Bounding box of point sets, padded by a fraction of its size.
void bounds_of(const std::vector<std::vector<Vec2>>& sets, Vec2& lo, Vec2& hi, double pad = 0.08);

}  // namespace sdtd
