#pragma once
// Shared fixtures for the test binaries: small hand-built games and random instance generators.

#include <algorithm>
#include <cmath>
#include <vector>

#include "congeq/game.hpp"
#include "congeq/projection.hpp"
#include "congeq/rng.hpp"

namespace testing {

using namespace congeq;

/// c(X) = X up to 4, 3X - 8 beyond.
inline PiecewiseLinearCost example_kink_cost() { return PiecewiseLinearCost({{0.0, 1.0, 0.0}, {4.0, 3.0, 4.0}}); }

/// Two players on one resource, X_i = [0, 4], no utility.
inline GameInstance example_kink_game() {
    std::vector<Player> players(2, Player{BoxSimplexSet::box({0.0}, {4.0}), QuadPrefUtility{0.0, {0.0}}});
    return GameInstance(players, example_kink_cost(), 1);
}

/// Two players, X_i = [0, 2], c(X) = X, u_i = -(x - 1)^2. NE x = 0.4, nonatomic equilibrium x = 0.5.
inline GameInstance two_player_game() {
    std::vector<Player> players(2, Player{BoxSimplexSet::box({0.0}, {2.0}), QuadPrefUtility{1.0, {1.0}}});
    return GameInstance(players, PiecewiseLinearCost::affine(0.0, 1.0), 1);
}

/// Independent evaluator for costs given as affine pieces a_j + b_j X on [k_{j-1}, k_j].
struct AffinePieces {
    std::vector<double> breaks, a, b;
    double operator()(double X) const {
        std::size_t j = 0;
        while (j < breaks.size() && X > breaks[j]) ++j;
        return a[j] + b[j] * X;
    }
};

inline PiecewiseLinearCost random_cost(Rng& rng, double min_slope = 0.05) {
    const auto pieces = static_cast<std::size_t>(rng.uniform_int(1, 3));
    std::vector<PiecewiseLinearCost::Piece> p;
    double threshold = 0.0, slope = rng.uniform(min_slope, 1.0), value = rng.uniform(0.0, 2.0);
    for (std::size_t j = 0; j < pieces; ++j) {
        p.push_back({threshold, slope, value});
        const double next = threshold + rng.uniform(0.5, 5.0);
        value += slope * (next - threshold);
        threshold = next;
        slope += rng.uniform(0.1, 1.0);
    }
    return PiecewiseLinearCost(p);
}

inline BoxSimplexSet random_set(Rng& rng, std::size_t T, bool with_total) {
    Vector lo(T), hi(T);
    for (std::size_t t = 0; t < T; ++t) {
        lo[t] = rng.uniform(0.0, 1.0);
        hi[t] = lo[t] + rng.uniform(0.2, 3.0);
    }
    if (!with_total) return BoxSimplexSet::box(lo, hi);
    double sl = 0.0, su = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        sl += lo[t];
        su += hi[t];
    }
    return BoxSimplexSet::simplex(sl + rng.uniform(0.1, 0.9) * (su - sl), lo, hi);
}

inline Vector random_point(Rng& rng, const BoxSimplexSet& set) {
    Vector v(set.dim());
    for (std::size_t t = 0; t < v.size(); ++t) v[t] = rng.uniform(set.lower[t] - 1.0, set.upper[t] + 1.0);
    return project_box_simplex(v, set);
}

inline ActionProfile random_profile(Rng& rng, const GameInstance& game) {
    ActionProfile x(game.num_players(), game.horizon());
    for (std::size_t i = 0; i < game.num_players(); ++i) {
        const Vector p = random_point(rng, game.player(i).set);
        std::copy(p.begin(), p.end(), x.row(i).begin());
    }
    return x;
}

struct RandomGameOptions {
    std::size_t players = 3;
    std::size_t horizon = 2;
    bool with_total = true;
    bool coupled = false;
    double omega_lo = 0.5, omega_hi = 3.0;
    double min_slope = 0.05;
};

/// Players with preferences inside their sets. Optional positive coupling rows are strictly
/// feasible and usually bind below the preference aggregate.
inline GameInstance random_game(Rng& rng, const RandomGameOptions& o) {
    std::vector<Player> players;
    for (std::size_t i = 0; i < o.players; ++i) {
        BoxSimplexSet set = random_set(rng, o.horizon, o.with_total);
        Vector pref = random_point(rng, set);
        players.push_back({std::move(set), {rng.uniform(o.omega_lo, o.omega_hi), std::move(pref)}});
    }
    std::vector<PiecewiseLinearCost> costs;
    for (std::size_t t = 0; t < o.horizon; ++t) costs.push_back(random_cost(rng, o.min_slope));
    std::optional<CouplingConstraints> coupling;
    if (o.coupled) {
        const std::size_t rows = static_cast<std::size_t>(rng.uniform_int(1, 3));
        CouplingConstraints cc{Matrix(rows, o.horizon), Vector(rows)};
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t t = 0; t < o.horizon; ++t) cc.matrix(r, t) = rng.uniform(0.1, 1.0);
        // Low point: every player minimizes the summed row weights (greedy fill, cheapest first).
        Vector weight(o.horizon, 0.0);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t t = 0; t < o.horizon; ++t) weight[t] += cc.matrix(r, t);
        std::vector<std::size_t> order(o.horizon);
        for (std::size_t t = 0; t < o.horizon; ++t) order[t] = t;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return weight[a] < weight[b]; });
        Vector low(o.horizon, 0.0), mid(o.horizon, 0.0);
        for (const Player& p : players) {
            Vector x = p.set.lower;
            if (p.set.total) {
                double left = *p.set.total;
                for (double v : x) left -= v;
                for (std::size_t t : order) {
                    const double add = std::min(p.set.upper[t] - x[t], left);
                    x[t] += add;
                    left -= add;
                }
            }
            for (std::size_t t = 0; t < o.horizon; ++t) {
                low[t] += x[t];
                mid[t] += p.utility.preference[t];
            }
        }
        for (std::size_t r = 0; r < rows; ++r) {
            const double at_low = dot(cc.matrix.row(r), low);
            const double at_mid = dot(cc.matrix.row(r), mid);
            cc.rhs[r] = at_low + rng.uniform(0.2, 0.8) * std::max(at_mid - at_low, 0.0) + 0.05;
        }
        coupling = std::move(cc);
    }
    return GameInstance(std::move(players), std::move(costs), std::move(coupling));
}

}  // namespace testing
