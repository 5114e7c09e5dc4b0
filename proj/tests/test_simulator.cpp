#include <doctest.h>

#include <cmath>

#include "sdtd/barrier.hpp"
#include "sdtd/dominance.hpp"
#include "sdtd/phase1.hpp"
#include "sdtd/simulator.hpp"
#include "sdtd/strategies.hpp"

using namespace sdtd;

namespace {
class ConstantHeading : public Strategy {
public:
    explicit ConstantHeading(Vec2 h) : h_(h) {}
    StrategyDecision decide(const Observation&, const GameConfig&) override {
        StrategyDecision d;
        d.heading = h_;
        return d;
    }
    std::string name() const override { return "constant"; }

private:
    Vec2 h_;
};
}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("single step") {
    GameConfig cfg;
    cfg.dt = 0.1;
    const GameState s = step({{2, 3}, {5, 5}}, {1, 0}, {0, -1}, cfg);
    CHECK(s.xD.x == doctest::Approx(2.05));
    CHECK(s.xD.y == doctest::Approx(3.0));
    CHECK(s.xA.y == doctest::Approx(4.9));
}

TEST_CASE("straight race to the target") {
    GameConfig cfg;
    StraightLineStrategy D(Role::Defender), A(Role::Attacker);
    const Trace tr = run({{1.5, 0}, {100, 0}}, D, A, cfg);
    CHECK(tr.outcome == Outcome::DefenderWin);
    CHECK(std::abs(tr.t_f - 1.0) <= 2 * cfg.dt);
    CHECK(tr.reason == "target-guarded");
}

TEST_CASE("capture is detected between samples") {
    GameConfig cfg;
    cfg.dt = 1.5;
    // head-on: both endpoints of the first step are outside the disk
    ConstantHeading D({-1, 0}), A({1, 0});
    const GameState s0{{0, 3}, {-1.2, 3.2}};
    REQUIRE(step(s0, {-1, 0}, {1, 0}, cfg).R() > cfg.r);
    const Trace tr = run(s0, D, A, cfg);
    CHECK(tr.outcome == Outcome::DefenderWin);
    CHECK(tr.reason == "capture");
    CHECK(tr.t_f == doctest::Approx((1.2 - std::sqrt(1.0 - 0.04)) / 1.5).epsilon(1e-3));
}

TEST_CASE("runs are deterministic") {
    GameConfig cfg;
    auto once = [&] {
        SecurityStrategy D(Role::Defender), A(Role::Attacker);
        return run({{4, 0}, {5, 3}}, D, A, cfg);
    };
    const Trace a = once(), b = once();
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t k = 0; k < a.rows.size(); ++k) {
        CHECK(a.rows[k].state.xD.x == b.rows[k].state.xD.x);
        CHECK(a.rows[k].state.xA.y == b.rows[k].state.xA.y);
    }
    CHECK(a.outcome == b.outcome);
    CHECK(a.t_f == b.t_f);
}

TEST_CASE("no tunneling and the capture circle holds under equilibrium play") {
    GameConfig cfg;
    const GameState s0 = from_reduced({3.0, 1.5, Chirality::CounterClockwise}, 0.3, cfg);
    SecurityStrategy D(Role::Defender), A(Role::Attacker);
    const Trace tr = run(s0, D, A, cfg);
    const double band = manifold_band(cfg);
    bool latched = false;
    for (std::size_t k = 0; k + 1 < tr.rows.size(); ++k) {
        const auto& p = tr.rows[k].state;
        const auto& q = tr.rows[k + 1].state;
        // breaking free past theta dagger ends Phase II
        if (tr.rows[k].phase == PhaseLabel::III) break;
        if (std::abs(p.R() - cfg.r) <= band) latched = true;
        if (latched) CHECK(std::abs(p.R() - cfg.r) <= 2 * band);
        // relative motion is linear over one step
        CHECK(segment_distance({0, 0}, p.xD - p.xA, q.xD - q.xA) >= cfg.r - cfg.tol_pos - 2 * band);
    }
    CHECK(latched);
    CHECK(tr.outcome != Outcome::Timeout);
}

TEST_CASE("probes from inside the defender region stay there") {
    GameConfig cfg;
    const Vec2 xD{4, 0};
    const double V0 = 0.2;
    const Vec2 xA = attacker_locus(V0, 0.3, xD, cfg);
    const GameState s0{xD, xA};
    const Classification c0 = classify(s0, cfg);
    REQUIRE(c0.has_value);
    CHECK(c0.V == doctest::Approx(V0).epsilon(1e-3));
    const NonPenetrationReport rep = barrier_nonpenetration_sweep(s0, 0.4, 36, cfg);
    CHECK(rep.attacker_wins == 0);
    CHECK(rep.failures == 0);
    int valued = 0;
    for (const auto& p : rep.probes) {
        if (p.has_value) {
            CHECK(p.V >= V0 - 0.05);
            ++valued;
        }
        CHECK(p.region != "attacker-win");
    }
    CHECK(valued > 0);
}

TEST_CASE("outcome grid") {
    GameConfig cfg;
    const Vec2 xD{4, 0};
    const GridSpec g{-9, 9, -9, 9, 6, 6};
    const auto cells = outcome_grid(
        xD, g, [] { return std::make_unique<SecurityStrategy>(Role::Defender); },
        [] { return std::make_unique<SecurityStrategy>(Role::Attacker); }, cfg);
    REQUIRE(cells.size() == 36);
    const double R = natural_barrier(xD, cfg).radius;
    int agree = 0, counted = 0;
    for (const auto& c : cells) {
        const GameState s{xD, c.xA};
        if (s.R() <= cfg.r) continue;
        if (c.xA.norm() > R + 2 * 3.0) CHECK(c.outcome == Outcome::DefenderWin);
        if (in_attacker_dominance({0, 0}, s, cfg)) CHECK(c.outcome == Outcome::AttackerWin);
        const Classification k = classify(s, cfg);
        if (k.region == Region::OnBarrier) continue;
        ++counted;
        agree += (k.region == Region::AttackerWin) == (c.outcome == Outcome::AttackerWin);
    }
    CHECK(agree >= 0.95 * counted);
}

}
