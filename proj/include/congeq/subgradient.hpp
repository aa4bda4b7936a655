#pragma once

#include <span>
#include <vector>

#include "congeq/cost.hpp"
#include "congeq/game.hpp"

namespace congeq {

/// atomic: the map H (players see their own impact on the price through x_{i,t} a_t).
/// nonatomic: the map H' (no own-impact term).
enum class Mode { atomic, nonatomic };

/// One stacked subgradient g = (g_i)_i, one row per player or population.
struct SubgradientSelection {
    Matrix g;
    Mode mode = Mode::atomic;
};

/// Per-resource price c_t(X_t) and the selected slope a_t in the subdifferential of c_t at X_t.
struct PriceState {
    Vector price;
    Vector slope;
};

PriceState price_state(const std::vector<PiecewiseLinearCost>& costs, std::span<const double> X,
                       SelectionRule rule);

/// out = c(X) + [x (.) a if atomic] + 2 w (x - y).
void player_subgradient(std::span<const double> x, const QuadPrefUtility& utility, const PriceState& prices,
                        Mode mode, std::span<double> out);

/// Element of H(x) chosen with one shared slope selection per resource.
SubgradientSelection h_map(const ActionProfile& profile, const GameInstance& game,
                           SelectionRule rule = SelectionRule::right);

/// Element of H'(x).
SubgradientSelection h_prime_map(const ActionProfile& profile, const GameInstance& game,
                                 SelectionRule rule = SelectionRule::right);

/// sum_i <g_i - h_i, x_i - y_i> with g selected at x by rule_x and h at y by rule_y.
double monotonicity_gap(const ActionProfile& x, const ActionProfile& y, const GameInstance& game, Mode mode,
                        SelectionRule rule_x = SelectionRule::right, SelectionRule rule_y = SelectionRule::right);

}  // namespace congeq
