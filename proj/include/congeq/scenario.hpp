#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "congeq/game.hpp"

namespace congeq {

/// EV-charging experiment: I households over T hourly slots sharing an increasing-block tariff.
struct ScenarioSpec {
    std::size_t players = 200;
    std::size_t horizon = 24;
    std::uint64_t seed = 1;
    PiecewiseLinearCost price;  ///< default_price() unless overridden
    double capacity = 1400.0;
    double ramp = 50.0;
    double mass_lo = 1.0, mass_hi = 30.0;
    double omega_lo = 1.0, omega_hi = 10.0;
    std::size_t max_redraws = 100;

    ScenarioSpec();
    void validate() const;
};

struct Scenario {
    ScenarioSpec spec;
    GameInstance game;
    /// Charging window per player, 0-based inclusive [first, last].
    std::vector<std::array<std::size_t, 2>> windows;
    std::size_t redraws = 0;   ///< bound redraws over all players
    std::size_t widened = 0;   ///< players whose upper bounds were widened after max_redraws
};

/// c(X) = 1 + 0.1X up to 500, -49 + 0.2X up to 1000, -349 + 0.5X beyond.
PiecewiseLinearCost default_price();

/// T capacity rows X_t <= capacity, then X_T - X_1 <= ramp and X_1 - X_T <= ramp.
CouplingConstraints ev_coupling(std::size_t horizon, double capacity, double ramp);

/// Fills lower bounds, then the earliest slots up to their upper bounds until the mass is reached.
Vector greedy_preference(double mass, std::span<const double> lower, std::span<const double> upper);

/// Player i depends only on (seed, i), so a scenario is a prefix of any larger one with the same seed.
Scenario generate(const ScenarioSpec& spec);

/// Player list with each of the given players repeated `copies` times (type-major order).
GameInstance replicate_players(const GameInstance& game, std::size_t copies);

}  // namespace congeq
