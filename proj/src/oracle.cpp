#include "congeq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace congeq {

double deviation_cost(const GameInstance& game, std::size_t i, std::span<const double> x,
                      std::span<const double> others) {
    const QuadPrefUtility& u = game.player(i).utility;
    double f = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        f += x[t] * game.cost(t)(std::max(others[t] + x[t], 0.0));
        const double d = x[t] - u.preference[t];
        f += u.weight * d * d;
    }
    return f;
}

namespace {

struct Layout {
    std::vector<std::size_t> gridded;  ///< coordinates enumerated on the grid
    std::optional<std::size_t> implied;  ///< coordinate fixed by the mass total
};

Layout layout_of(const BoxSimplexSet& set) {
    Layout L;
    for (std::size_t t = 0; t < set.dim(); ++t)
        if (set.lower[t] < set.upper[t]) L.gridded.push_back(t);
    if (set.total && !L.gridded.empty()) {
        L.implied = L.gridded.back();
        L.gridded.pop_back();
    }
    return L;
}

/// Sets the implied coordinate from the mass; false when it leaves its bounds.
bool complete(const BoxSimplexSet& set, const Layout& L, Vector& x) {
    if (!L.implied) return true;
    double rest = *set.total;
    for (std::size_t t = 0; t < x.size(); ++t)
        if (t != *L.implied) rest -= x[t];
    const std::size_t k = *L.implied;
    const double tol = 1e-12 * (1.0 + std::abs(*set.total));
    if (rest < set.lower[k] - tol || rest > set.upper[k] + tol) return false;
    x[k] = std::clamp(rest, set.lower[k], set.upper[k]);
    return true;
}

double golden_min(auto&& f, double a, double b, double tol) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

Vector best_response_oracle(const GameInstance& game, std::size_t i, const ActionProfile& profile,
                            const GridSpec& grid) {
    const std::size_t T = game.horizon();
    if (T > 3) throw std::invalid_argument("oracle supports at most 3 resources");
    if (game.coupling()) throw std::invalid_argument("oracle does not handle coupling constraints");
    const BoxSimplexSet& set = game.player(i).set;
    Vector others = aggregate(profile);
    for (std::size_t t = 0; t < T; ++t) others[t] -= profile(i, t);

    const Layout L = layout_of(set);
    std::vector<std::size_t> counts;
    double total_points = 1.0;
    for (std::size_t t : L.gridded) {
        const double h = grid.step_for(t);
        if (!(h > 0.0)) throw std::invalid_argument("grid step must be positive");
        const auto n = static_cast<std::size_t>(std::floor((set.upper[t] - set.lower[t]) / h + 1e-9)) + 1;
        counts.push_back(n);
        total_points *= static_cast<double>(n);
    }
    if (total_points > static_cast<double>(grid.max_points)) throw std::length_error("oracle grid too large");

    auto f = [&](const Vector& x) { return deviation_cost(game, i, x, others); };

    Vector x = set.lower;
    Vector best;
    double best_f = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> idx(L.gridded.size(), 0);
    for (;;) {
        for (std::size_t j = 0; j < L.gridded.size(); ++j) {
            const std::size_t t = L.gridded[j];
            x[t] = std::min(set.lower[t] + static_cast<double>(idx[j]) * grid.step_for(t), set.upper[t]);
        }
        if (complete(set, L, x)) {
            const double v = f(x);
            if (v < best_f) {
                best_f = v;
                best = x;
            }
        }
        std::size_t j = 0;
        while (j < idx.size() && ++idx[j] == counts[j]) idx[j++] = 0;
        if (j == idx.size()) break;
    }
    if (best.empty()) throw std::runtime_error("oracle grid contains no feasible point");

    // One golden-section pass per gridded coordinate, within one step of the grid argmin.
    for (std::size_t t : L.gridded) {
        const double h = grid.step_for(t);
        double a = std::max(set.lower[t], best[t] - h);
        double b = std::min(set.upper[t], best[t] + h);
        if (L.implied) {
            // Keep the implied coordinate inside its bounds.
            const std::size_t k = *L.implied;
            const double slack_up = best[k] - set.lower[k];
            const double slack_down = set.upper[k] - best[k];
            a = std::max(a, best[t] - slack_down);
            b = std::min(b, best[t] + slack_up);
        }
        if (!(b > a)) continue;
        auto along = [&](double s) {
            Vector y = best;
            y[t] = s;
            if (!complete(set, L, y)) return std::numeric_limits<double>::infinity();
            return f(y);
        };
        const double s = golden_min(along, a, b, 1e-8);
        Vector y = best;
        y[t] = s;
        if (complete(set, L, y) && f(y) <= best_f) {
            best_f = f(y);
            best = y;
        }
    }
    return best;
}

OracleResult ne_fixed_point_oracle(const GameInstance& game, const GridSpec& grid, std::size_t max_rounds,
                                   const std::optional<ActionProfile>& start) {
    const std::size_t I = game.num_players();
    const std::size_t T = game.horizon();
    OracleResult res;
    if (start) {
        res.profile = *start;
    } else {
        res.profile = Matrix(I, T);
        for (std::size_t i = 0; i < I; ++i) {
            Vector x = game.player(i).set.lower;
            const BoxSimplexSet& set = game.player(i).set;
            if (set.total) {
                double left = *set.total;
                for (double v : x) left -= v;
                for (std::size_t t = 0; t < T && left > 0.0; ++t) {
                    const double add = std::min(set.upper[t] - x[t], left);
                    x[t] += add;
                    left -= add;
                }
            }
            std::copy(x.begin(), x.end(), res.profile.row(i).begin());
        }
    }
    double h = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < T; ++t) h = std::min(h, grid.step_for(t));

    for (res.rounds = 1; res.rounds <= max_rounds; ++res.rounds) {
        res.last_change = 0.0;
        for (std::size_t i = 0; i < I; ++i) {
            const Vector br = best_response_oracle(game, i, res.profile, grid);
            for (std::size_t t = 0; t < T; ++t) {
                res.last_change = std::max(res.last_change, std::abs(br[t] - res.profile(i, t)));
                res.profile(i, t) = br[t];
            }
        }
        if (res.last_change < h) {
            res.converged = true;
            return res;
        }
    }
    res.rounds = max_rounds;
    return res;
}

}  // namespace congeq
