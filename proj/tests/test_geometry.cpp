#include <doctest.h>

#include <cmath>
#include <random>

#include "sdtd/errors.hpp"
#include "sdtd/geometry.hpp"

using namespace sdtd;

TEST_SUITE("geometry") {

TEST_CASE("line-of-sight angle examples") {
    CHECK(los_angle({{1, 0}, {0, 0}}) == doctest::Approx(0.0));
    CHECK(los_angle({{0, 1}, {0, 0}}) == doctest::Approx(kPi / 2));
    CHECK(los_angle({{3.5, 0}, {4.3021, 1.5550}}) == doctest::Approx(std::atan2(-1.5550, -0.8021)));
    CHECK(los_angle({{3.5, 0}, {4.3021, 1.5550}}) == doctest::Approx(-2.0473).epsilon(1e-4));
    CHECK_THROWS_AS(los_angle({{1, 1}, {1, 1}}), GeometryError);
}

TEST_CASE("wrap_angle stays in [-pi, pi)") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-50.0, 50.0);
    for (int k = 0; k < 1000; ++k) {
        const double a = U(rng);
        const double w = wrap_angle(a);
        CHECK(w >= -kPi);
        CHECK(w < kPi);
        CHECK(std::abs(std::remainder(a - w, 2 * kPi)) < 1e-9);
    }
    CHECK(wrap_angle(kPi) == doctest::Approx(-kPi));
}

TEST_CASE("reduced coordinates on the capture circle") {
    GameConfig cfg;
    auto a = to_reduced({{2, 0}, {3, 0}}, cfg);
    CHECK(a.rhoD == doctest::Approx(2.0));
    CHECK(a.theta == doctest::Approx(0.0));
    auto b = to_reduced({{2, 0}, {1, 0}}, cfg);
    CHECK(b.theta == doctest::Approx(kPi));
    auto c = to_reduced({{2, 0}, {2, 1}}, cfg);
    CHECK(c.theta == doctest::Approx(kPi / 2));
    CHECK(c.chirality == Chirality::CounterClockwise);
    auto d = to_reduced({{2, 0}, {2, -1}}, cfg);
    CHECK(d.chirality == Chirality::Clockwise);
    CHECK(d.theta == doctest::Approx(kPi / 2));
    CHECK_THROWS_AS(to_reduced({{2, 0}, {4, 0}}, cfg), ConstraintError);
}

TEST_CASE("from_reduced inverts to_reduced") {
    GameConfig cfg;
    const GameState s = from_reduced({2.0, kPi, Chirality::CounterClockwise}, 0.0, cfg);
    CHECK(s.xD.x == doctest::Approx(2.0));
    CHECK(s.xD.y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.xA.x == doctest::Approx(1.0));
    CHECK(std::abs(s.xA.y) < 1e-12);

    const GameState corner = from_reduced({cfg.r, kPi, Chirality::CounterClockwise}, 0.3, cfg);
    CHECK(corner.rhoA() == 0.0);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> rho(1.05, 9.0), th(0.0, kPi), ga(-kPi, kPi);
    for (int k = 0; k < 100; ++k) {
        const ReducedState rs{rho(rng), th(rng), k % 2 ? Chirality::Clockwise : Chirality::CounterClockwise};
        const double gamma = ga(rng);
        const GameState st = from_reduced(rs, gamma, cfg);
        CHECK(st.R() == doctest::Approx(cfg.r).epsilon(1e-12));
        const ReducedState back = to_reduced(st, cfg);
        CHECK(back.rhoD == doctest::Approx(rs.rhoD).epsilon(1e-12));
        CHECK(std::abs(back.theta - rs.theta) < 1e-9);
        if (rs.theta > 1e-9 && rs.theta < kPi - 1e-9) CHECK(back.chirality == rs.chirality);
        CHECK(std::atan2(st.xD.y, st.xD.x) == doctest::Approx(gamma).epsilon(1e-12));
        // attacker range from the closed form
        CHECK(std::abs(rhoA_on_circle(rs.rhoD, rs.theta, cfg.r) - st.rhoA()) <= cfg.tol_pos);
    }
}

TEST_CASE("mirror symmetry flips chirality only") {
    GameConfig cfg;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> rho(1.5, 6.0), th(0.05, kPi - 0.05), ga(-kPi, kPi);
    for (int k = 0; k < 50; ++k) {
        const ReducedState rs{rho(rng), th(rng), Chirality::CounterClockwise};
        const GameState s = from_reduced(rs, ga(rng), cfg);
        const GameState m{mirror_x(s.xD), mirror_x(s.xA)};
        const ReducedState a = to_reduced(s, cfg), b = to_reduced(m, cfg);
        CHECK(a.rhoD == doctest::Approx(b.rhoD));
        CHECK(a.theta == doctest::Approx(b.theta));
        CHECK(a.chirality != b.chirality);
    }
}

TEST_CASE("segment distance") {
    CHECK(segment_distance({0, 1}, {-1, 0}, {1, 0}) == doctest::Approx(1.0));
    CHECK(segment_distance({3, 0}, {-1, 0}, {1, 0}) == doctest::Approx(2.0));
    CHECK(segment_distance({5, 5}, {1, 1}, {1, 1}) == doctest::Approx(std::sqrt(32.0)));
}

TEST_CASE("config validation") {
    GameConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.nu = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.nu = 0.5;
    cfg.r = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.r = 1.0;
    cfg.dt = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

}
