#include <doctest.h>

#include <cmath>
#include <random>

#include "sdtd/dominance.hpp"
#include "sdtd/errors.hpp"
#include "sdtd/simulator.hpp"
#include "sdtd/strategies.hpp"

using namespace sdtd;

namespace {
// Attacker-dominance check by brute force: every sample of the segment
// from the attacker to p must be strictly closer (time-wise) to the attacker.
bool brute_attacker_dominance(Vec2 p, const GameState& s, const GameConfig& cfg, int n = 10000) {
    for (int k = 0; k <= n; ++k) {
        const Vec2 q = s.xA + (p - s.xA) * (double(k) / n);
        if (distance(q, s.xD) - cfg.r - cfg.nu * distance(q, s.xA) <= 0.0) return false;
    }
    return true;
}
}  // namespace

TEST_SUITE("dominance") {

TEST_CASE("on-axis oval distances") {
    GameConfig cfg;
    const GameState s{{2, 0}, {4, 0}};
    CHECK(oval_distance(s, cfg, 0.0, OvalBranch::Near) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(oval_distance(s, cfg, 0.0, OvalBranch::Far) == doctest::Approx(6.0).epsilon(1e-12));
    const double phiS = phi_bar_max(s, cfg);
    CHECK(oval_distance(s, cfg, phiS, OvalBranch::Near) == doctest::Approx(oval_distance(s, cfg, phiS, OvalBranch::Far)).epsilon(1e-6));
    CHECK_THROWS_AS(oval_distance(s, cfg, phiS + 0.01, OvalBranch::Near), OutOfSupportError);
    CHECK_THROWS_AS(oval_distance({{2, 0}, {2.5, 0}}, cfg, 0.0, OvalBranch::Near), GeometryError);
}

TEST_CASE("support half-angle") {
    GameConfig cfg;
    CHECK(phi_bar_max({{2, 0}, {3, 0}}, cfg) == doctest::Approx(std::acos(-0.5)).epsilon(1e-12));
    CHECK(phi_bar_max({{2, 0}, {3, 0}}, cfg) == doctest::Approx(2.0944).epsilon(1e-4));
    // arccos((sqrt(0.75 * 3) - 0.5) / 2) = arccos(0.5)
    CHECK(phi_bar_max({{2, 0}, {4, 0}}, cfg) == doctest::Approx(kPi / 3).epsilon(1e-12));
    CHECK_THROWS_AS(phi_bar_max({{2, 0}, {2.5, 0}}, cfg), GeometryError);
}

TEST_CASE("defender dominance membership") {
    GameConfig cfg;
    const GameState s{{2, 0}, {4, 0}};
    CHECK(in_defender_dominance(s.xD, s, cfg));
    CHECK(in_defender_dominance({0, 0}, s, cfg));
    const CartesianOval oval = sample_oval(s, cfg);
    CHECK(oval.samples.size() == 512);
    for (const auto& o : oval.samples) {
        for (Vec2 p : {o.point_near, o.point_far}) {
            CHECK(std::abs((distance(p, s.xD) - cfg.r) / distance(p, s.xA) - cfg.nu) <= 10 * cfg.tol_pos);
        }
    }
}

TEST_CASE("attacker dominance membership") {
    GameConfig cfg;
    const GameState s{{2, 0}, {4, 3}};
    CHECK(in_attacker_dominance({4, 10}, s, cfg));
    CHECK_FALSE(in_attacker_dominance({0, 0}, s, cfg));
    CHECK(in_attacker_dominance(s.xA, s, cfg));
    const GameState inside{{2, 0}, {2.5, 0}};
    CHECK_FALSE(in_attacker_dominance({10, 10}, inside, cfg));
    CHECK_FALSE(in_attacker_dominance({-5, 0}, inside, cfg));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-8.0, 8.0);
    for (int k = 0; k < 200; ++k) {
        const Vec2 p{U(rng), U(rng)};
        CHECK(in_attacker_dominance(p, s, cfg) == brute_attacker_dominance(p, s, cfg, 4000));
    }
}

TEST_CASE("blocking") {
    GameConfig cfg;
    CHECK_FALSE(is_blocking({{1.2, 0}, {5, 0}}, cfg));
    CHECK_FALSE(is_blocking({{5, 0}, {2, 2}}, cfg));
    // Defender at (3,0), attacker at (5,0): the origin already belongs to the
    // defender, so this is not a blocking configuration.
    CHECK_FALSE(is_blocking({{3, 0}, {5, 0}}, cfg));
    CHECK(is_blocking({{5, 0}, {6.5, 0}}, cfg));
}

TEST_CASE("nesting in nu") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-8.0, 8.0);
    GameConfig lo, hi;
    lo.nu = 0.4;
    hi.nu = 0.6;
    const GameState s{{2, 1}, {5, -1}};
    for (int k = 0; k < 2000; ++k) {
        const Vec2 p{U(rng), U(rng)};
        if (in_defender_dominance(p, s, lo)) CHECK(in_defender_dominance(p, s, hi));
    }
}

TEST_CASE("target in attacker dominance means a straight run wins") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(-6.0, 6.0), nu(0.3, 0.8);
    int tested = 0;
    while (tested < 50) {
        GameConfig cfg;
        cfg.nu = nu(rng);
        cfg.dt = 2e-3;
        const GameState s{{U(rng), U(rng)}, {U(rng), U(rng)}};
        if (s.rhoD() <= cfg.r || s.R() <= cfg.r || s.rhoA() < 0.05) continue;
        if (!in_attacker_dominance({0, 0}, s, cfg)) continue;
        StraightLineStrategy D(Role::Defender), A(Role::Attacker);
        const Trace tr = run(s, D, A, cfg);
        CHECK(tr.outcome == Outcome::AttackerWin);
        ++tested;
    }
}

}
