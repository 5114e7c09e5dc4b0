#include "sdtd/export.hpp"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <sstream>

#include "sdtd/errors.hpp"

namespace sdtd {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string attr_id(const std::string& id) { return id.empty() ? std::string() : " id=\"" + id + "\""; }

Vec2 vec_from_json(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(std::string(what) + " must be a two-element number array");
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

nlohmann::json to_json(const Scenario& s) {
    nlohmann::json j;
    j["nu"] = s.config.nu;
    j["r"] = s.config.r;
    j["eps_safe"] = s.config.eps_safe;
    j["dt"] = s.config.dt;
    j["h_ode"] = s.config.h_ode;
    j["tol_pos"] = s.config.tol_pos;
    j["tol_angle"] = s.config.tol_angle;
    j["tol_value"] = s.config.tol_value;
    if (s.xD) j["xD"] = {s.xD->x, s.xD->y};
    if (s.xA) j["xA"] = {s.xA->x, s.xA->y};
    if (s.t_max) j["t_max"] = *s.t_max;
    j["defender"] = s.defender;
    j["attacker"] = s.attacker;
    j["out"] = s.out;
    j["seed"] = s.seed;
    return j;
}

Scenario scenario_from_json(const nlohmann::json& j, Scenario base) {
    if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
    try {
        auto num_field = [&](const char* key, double& dst) {
            if (j.contains(key)) dst = j.at(key).get<double>();
        };
        num_field("nu", base.config.nu);
        num_field("r", base.config.r);
        num_field("eps_safe", base.config.eps_safe);
        num_field("dt", base.config.dt);
        num_field("h_ode", base.config.h_ode);
        num_field("tol_pos", base.config.tol_pos);
        num_field("tol_angle", base.config.tol_angle);
        num_field("tol_value", base.config.tol_value);
        if (j.contains("xD")) base.xD = vec_from_json(j.at("xD"), "xD");
        if (j.contains("xA")) base.xA = vec_from_json(j.at("xA"), "xA");
        if (j.contains("t_max")) base.t_max = j.at("t_max").get<double>();
        if (j.contains("defender")) base.defender = j.at("defender").get<std::string>();
        if (j.contains("attacker")) base.attacker = j.at("attacker").get<std::string>();
        if (j.contains("out")) base.out = j.at("out").get<std::string>();
        if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad scenario field: ") + e.what());
    }
    return base;
}

void write_trace_csv(std::ostream& os, const Trace& tr) {
    os << "t,xD_x,xD_y,xA_x,xA_y,phase,R,rhoD,rhoA\n";
    for (const auto& r : tr.rows)
        os << num(r.t) << ',' << num(r.state.xD.x) << ',' << num(r.state.xD.y) << ',' << num(r.state.xA.x) << ','
           << num(r.state.xA.y) << ',' << to_string(r.phase) << ',' << num(r.R) << ',' << num(r.rhoD) << ','
           << num(r.rhoA) << '\n';
    os << "outcome," << to_string(tr.outcome) << ',' << num(tr.t_f) << '\n';
}

void write_grid_csv(std::ostream& os, const std::vector<GridCell>& cells) {
    os << "xA_x,xA_y,outcome,t_f\n";
    for (const auto& c : cells)
        os << num(c.xA.x) << ',' << num(c.xA.y) << ',' << to_string(c.outcome) << ',' << num(c.t_f) << '\n';
}

void write_barrier_csv(std::ostream& os, const BarrierCurve& b) {
    os << "x,y,segment-label\n";
    for (std::size_t k = 0; k < b.polyline.size(); ++k)
        os << num(b.polyline[k].x) << ',' << num(b.polyline[k].y) << ',' << b.labels[k] << '\n';
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

SvgDocument::SvgDocument(Vec2 lo, Vec2 hi, double width_px) : lo_(lo), hi_(hi) {
    const double w = std::max(hi.x - lo.x, 1e-9);
    scale_ = width_px / w;
}

double SvgDocument::sx(double x) const { return (x - lo_.x) * scale_; }
double SvgDocument::sy(double y) const { return (hi_.y - y) * scale_; }

void SvgDocument::path(const std::vector<Vec2>& pts, bool closed, const std::string& style, const std::string& id) {
    if (pts.empty()) return;
    std::ostringstream d;
    for (std::size_t k = 0; k < pts.size(); ++k)
        d << (k == 0 ? "M" : " L") << num(sx(pts[k].x)) << ' ' << num(sy(pts[k].y));
    if (closed) d << " Z";
    body_.push_back("<path" + attr_id(id) + " d=\"" + d.str() + "\" style=\"" + style + "\"/>");
}

void SvgDocument::circle(Vec2 c, double radius, const std::string& style, const std::string& id) {
    body_.push_back("<circle" + attr_id(id) + " cx=\"" + num(sx(c.x)) + "\" cy=\"" + num(sy(c.y)) + "\" r=\"" +
                    num(radius * scale_) + "\" style=\"" + style + "\"/>");
}

void SvgDocument::marker(Vec2 p, const std::string& style, const std::string& id) {
    body_.push_back("<circle" + attr_id(id) + " cx=\"" + num(sx(p.x)) + "\" cy=\"" + num(sy(p.y)) +
                    "\" r=\"3\" style=\"" + style + "\"/>");
}

void SvgDocument::text(Vec2 p, const std::string& s) {
    std::string esc;
    for (char c : s) {
        if (c == '<') esc += "&lt;";
        else if (c == '>') esc += "&gt;";
        else if (c == '&') esc += "&amp;";
        else esc += c;
    }
    body_.push_back("<text x=\"" + num(sx(p.x)) + "\" y=\"" + num(sy(p.y)) + "\" font-size=\"12\">" + esc + "</text>");
}

std::string SvgDocument::str() const {
    std::ostringstream os;
    const double w = (hi_.x - lo_.x) * scale_;
    const double h = (hi_.y - lo_.y) * scale_;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
       << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\">\n";
    for (const auto& line : body_) os << "  " << line << '\n';
    os << "</svg>\n";
    return os.str();
}

void bounds_of(const std::vector<std::vector<Vec2>>& sets, Vec2& lo, Vec2& hi, double pad) {
    const double inf = std::numeric_limits<double>::infinity();
    lo = {inf, inf};
    hi = {-inf, -inf};
    for (const auto& s : sets)
        for (const auto& p : s) {
            lo.x = std::min(lo.x, p.x);
            lo.y = std::min(lo.y, p.y);
            hi.x = std::max(hi.x, p.x);
            hi.y = std::max(hi.y, p.y);
        }
    if (lo.x > hi.x) {
        lo = {-1.0, -1.0};
        hi = {1.0, 1.0};
    }
    const double px = std::max(hi.x - lo.x, 1.0) * pad;
    const double py = std::max(hi.y - lo.y, 1.0) * pad;
    lo = {lo.x - px, lo.y - py};
    hi = {hi.x + px, hi.y + py};
}

}  // namespace sdtd
