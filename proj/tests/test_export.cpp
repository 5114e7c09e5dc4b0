#include <doctest.h>

#include <sstream>

#include "sdtd/errors.hpp"
#include "sdtd/export.hpp"
#include "sdtd/strategies.hpp"

using namespace sdtd;

TEST_SUITE("export") {

TEST_CASE("scenario json round trip") {
    Scenario s;
    s.config.nu = 0.75;
    s.config.r = 1.5;
    s.xD = Vec2{6, 0};
    s.xA = Vec2{6.97, 0.25};
    s.defender = "straight-line";
    s.seed = 42;
    const Scenario t = scenario_from_json(to_json(s));
    CHECK(t.config.nu == 0.75);
    CHECK(t.config.r == 1.5);
    CHECK(t.xD->x == 6.0);
    CHECK(t.xA->y == 0.25);
    CHECK(t.defender == "straight-line");
    CHECK(t.attacker == "proposed");
    CHECK(t.seed == 42);
    CHECK(!t.t_max);
    CHECK(to_json(t) == to_json(s));

    CHECK_THROWS_AS(scenario_from_json(nlohmann::json::array()), ConfigError);
    CHECK_THROWS_AS(scenario_from_json({{"xD", {1}}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json({{"nu", "fast"}}), ConfigError);
}

TEST_CASE("trace csv layout") {
    GameConfig cfg;
    StraightLineStrategy D(Role::Defender), A(Role::Attacker);
    const Trace tr = run({{1.5, 0}, {100, 0}}, D, A, cfg);
    std::ostringstream os;
    write_trace_csv(os, tr);
    std::istringstream in(os.str());
    std::string first, line, last;
    std::getline(in, first);
    CHECK(first == "t,xD_x,xD_y,xA_x,xA_y,phase,R,rhoD,rhoA");
    std::size_t n = 0;
    while (std::getline(in, line)) {
        last = line;
        ++n;
    }
    CHECK(n == tr.rows.size() + 1);
    CHECK(last.rfind("outcome,defender-win,", 0) == 0);
}

TEST_CASE("hash") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("svg has one path per call") {
    SvgDocument svg({-1, -1}, {1, 1});
    svg.path({{0, 0}, {1, 0}, {1, 1}}, true, "fill:none", "a");
    svg.path({{0, 0}, {-1, 0}}, false, "fill:none", "b");
    svg.circle({0, 0}, 0.5, "fill:none");
    const std::string s = svg.str();
    std::size_t count = 0;
    for (std::size_t p = s.find("<path"); p != std::string::npos; p = s.find("<path", p + 1)) ++count;
    CHECK(count == 2);
    CHECK(s.find("id=\"a\"") != std::string::npos);
}

}
