#pragma once

#include <cstdio>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "sdtd/geometry.hpp"
#include "sdtd/phase1.hpp"

namespace sdtd {

enum class PhaseLabel { I, II, III };

std::string to_string(PhaseLabel p);

struct StrategyDecision {
    Vec2 heading;
    PhaseLabel phase{PhaseLabel::I};
    double V{std::numeric_limits<double>::quiet_NaN()};
    double gamma{std::numeric_limits<double>::quiet_NaN()};
    Chirality chirality{Chirality::CounterClockwise};
    std::string note;
    std::optional<ReducedState> entry;  ///< Phase-I entry state, when one was solved for
    std::optional<double> psi;
};

/// What a player sees before choosing a heading.
struct Observation {
    double t{0.0};
    GameState state;
    std::optional<Vec2> opponent_heading;  ///< opponent heading of the previous step
};

enum class Role { Defender, Attacker };

class Strategy {
public:
    virtual ~Strategy() = default;
    virtual StrategyDecision decide(const Observation& obs, const GameConfig& cfg) = 0;
    virtual std::string name() const = 0;
};

/// Half-width of the band around R = r in which a player treats the state as
/// being on the capture circle.
double manifold_band(const GameConfig& cfg);

/// Chirality with the counter-clockwise convention on the singular surface.
Chirality singular_tiebreak(const GameState& s, const GameConfig& cfg);

/// Defender heading that approaches the target as fast as possible while
/// keeping theta from increasing; used where that is achievable.
double blocking_heading(const ReducedState& rs, const GameConfig& cfg);

StrategyDecision defender_security(const GameState& s, const GameConfig& cfg, const Phase1Options& opt = {});
StrategyDecision attacker_security(const GameState& s, const GameConfig& cfg,
                                   std::optional<Vec2> defender_heading = std::nullopt,
                                   const Phase1Options& opt = {});
StrategyDecision baseline_straight_line_defender(const GameState& s);
StrategyDecision baseline_straight_line_attacker(const GameState& s);
StrategyDecision baseline_pure_pursuit_defender(const GameState& s);

/// Security strategy of either player. Keeps the last Phase-I entry as a
/// starting point for the next solve, which only changes how fast the
/// solution is found.
class SecurityStrategy : public Strategy {
public:
    explicit SecurityStrategy(Role role) : role_(role) {}
    StrategyDecision decide(const Observation& obs, const GameConfig& cfg) override;
    std::string name() const override { return "proposed"; }

private:
    Role role_;
    std::optional<ReducedState> seed_;
    std::optional<double> psi_;
};

class StraightLineStrategy : public Strategy {
public:
    explicit StraightLineStrategy(Role role) : role_(role) {}
    StrategyDecision decide(const Observation& obs, const GameConfig& cfg) override;
    std::string name() const override { return "straight-line"; }

private:
    Role role_;
};

class PurePursuitStrategy : public Strategy {
public:
    StrategyDecision decide(const Observation& obs, const GameConfig& cfg) override;
    std::string name() const override { return "pure-pursuit"; }
};

/// Child process speaking the line protocol: one "t xD_x xD_y xA_x xA_y" row
/// in, one "hx hy" heading out.
class ExternalStrategy : public Strategy {
public:
    explicit ExternalStrategy(std::string command);
    ~ExternalStrategy() override;
    ExternalStrategy(const ExternalStrategy&) = delete;
    ExternalStrategy& operator=(const ExternalStrategy&) = delete;

    StrategyDecision decide(const Observation& obs, const GameConfig& cfg) override;
    std::string name() const override { return "external:" + command_; }

private:
    std::string command_;
    int pid_{-1};
    std::FILE* to_child_{nullptr};
    std::FILE* from_child_{nullptr};
};

/// proposed, straight-line, pure-pursuit (defender only) or external:<path>.
std::unique_ptr<Strategy> make_strategy(const std::string& name, Role role);

}  // namespace sdtd
