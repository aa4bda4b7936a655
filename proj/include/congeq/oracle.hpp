#pragma once

#include <optional>

#include "congeq/game.hpp"

namespace congeq {

/// Brute-force grid for tiny games. For a set with a mass total the last free
/// coordinate is implied, so only the others are gridded.
struct GridSpec {
    double step = 1e-3;
    Vector steps;                      ///< per-coordinate override (empty: use `step`)
    std::size_t max_points = 10'000'000;

    double step_for(std::size_t t) const { return steps.empty() ? step : steps.at(t); }
};

/// Cost of player i playing x against the others' fixed aggregate:
/// sum_t x_t c_t(others_t + x_t) + w ||x - y||^2. Uses cost values only.
double deviation_cost(const GameInstance& game, std::size_t i, std::span<const double> x,
                      std::span<const double> others);

/// Grid argmin of player i's cost with the rest of `profile` fixed, then one golden-section
/// pass per coordinate (tolerance 1e-8) within one grid step. Throws std::length_error
/// when the grid exceeds max_points, std::invalid_argument for T > 3 or coupled games.
Vector best_response_oracle(const GameInstance& game, std::size_t i, const ActionProfile& profile,
                            const GridSpec& grid);

struct OracleResult {
    ActionProfile profile;
    bool converged = false;
    std::size_t rounds = 0;
    double last_change = 0.0;  ///< max-norm change of the last round
};

/// Round-robin best responses until no coordinate moves by a grid step. Non-convergence is
/// reported in the result, not thrown.
OracleResult ne_fixed_point_oracle(const GameInstance& game, const GridSpec& grid, std::size_t max_rounds,
                                   const std::optional<ActionProfile>& start = std::nullopt);

}  // namespace congeq
