#include "congeq/subgradient.hpp"

#include <stdexcept>

namespace congeq {

PriceState price_state(const std::vector<PiecewiseLinearCost>& costs, std::span<const double> X,
                       SelectionRule rule) {
    PriceState s{Vector(X.size()), Vector(X.size())};
    for (std::size_t t = 0; t < X.size(); ++t) {
        s.price[t] = costs[t](X[t]);
        s.slope[t] = select(costs[t].subdiff(X[t]), rule);
    }
    return s;
}

void player_subgradient(std::span<const double> x, const QuadPrefUtility& utility, const PriceState& prices,
                        Mode mode, std::span<double> out) {
    const double w2 = 2.0 * utility.weight;
    for (std::size_t t = 0; t < x.size(); ++t) {
        double g = prices.price[t] + w2 * (x[t] - utility.preference[t]);
        if (mode == Mode::atomic) g += x[t] * prices.slope[t];
        out[t] = g;
    }
}

namespace {

SubgradientSelection stacked(const ActionProfile& profile, const GameInstance& game, SelectionRule rule,
                             Mode mode) {
    if (profile.rows() != game.num_players() || profile.cols() != game.horizon())
        throw std::invalid_argument("profile dimensions do not match game");
    const PriceState prices = price_state(game.costs(), aggregate(profile), rule);
    SubgradientSelection sel{Matrix(profile.rows(), profile.cols()), mode};
    for (std::size_t i = 0; i < profile.rows(); ++i)
        player_subgradient(profile.row(i), game.player(i).utility, prices, mode, sel.g.row(i));
    return sel;
}

}  // namespace

SubgradientSelection h_map(const ActionProfile& profile, const GameInstance& game, SelectionRule rule) {
    return stacked(profile, game, rule, Mode::atomic);
}

SubgradientSelection h_prime_map(const ActionProfile& profile, const GameInstance& game, SelectionRule rule) {
    return stacked(profile, game, rule, Mode::nonatomic);
}

double monotonicity_gap(const ActionProfile& x, const ActionProfile& y, const GameInstance& game, Mode mode,
                        SelectionRule rule_x, SelectionRule rule_y) {
    const SubgradientSelection g = stacked(x, game, rule_x, mode);
    const SubgradientSelection h = stacked(y, game, rule_y, mode);
    double gap = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t t = 0; t < x.cols(); ++t) gap += (g.g(i, t) - h.g(i, t)) * (x(i, t) - y(i, t));
    return gap;
}

}  // namespace congeq
