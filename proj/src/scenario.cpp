#include "congeq/scenario.hpp"

#include <algorithm>
#include <stdexcept>

#include "congeq/rng.hpp"

namespace congeq {

ScenarioSpec::ScenarioSpec() : price(default_price()) {}

void ScenarioSpec::validate() const {
    if (players < 1) throw std::invalid_argument("scenario needs at least one player");
    if (horizon < 4) throw std::invalid_argument("scenario horizon must be at least 4");
    if (!(mass_lo > 0.0 && mass_lo <= mass_hi)) throw std::invalid_argument("bad mass range");
    if (!(omega_lo > 0.0 && omega_lo <= omega_hi)) throw std::invalid_argument("bad omega range");
    if (!(capacity >= 0.0 && ramp >= 0.0)) throw std::invalid_argument("capacity and ramp must be nonnegative");
}

PiecewiseLinearCost default_price() {
    return PiecewiseLinearCost({{0.0, 0.1, 1.0}, {500.0, 0.2, 51.0}, {1000.0, 0.5, 151.0}});
}

CouplingConstraints ev_coupling(std::size_t horizon, double capacity, double ramp) {
    CouplingConstraints cc{Matrix(horizon + 2, horizon), Vector(horizon + 2, capacity)};
    for (std::size_t t = 0; t < horizon; ++t) cc.matrix(t, t) = 1.0;
    cc.matrix(horizon, horizon - 1) = 1.0;
    cc.matrix(horizon, 0) = -1.0;
    cc.matrix(horizon + 1, 0) = 1.0;
    cc.matrix(horizon + 1, horizon - 1) = -1.0;
    cc.rhs[horizon] = ramp;
    cc.rhs[horizon + 1] = ramp;
    return cc;
}

Vector greedy_preference(double mass, std::span<const double> lower, std::span<const double> upper) {
    Vector y(lower.begin(), lower.end());
    double left = mass;
    for (double v : y) left -= v;
    for (std::size_t t = 0; t < y.size() && left > 0.0; ++t) {
        const double room = upper[t] - lower[t];
        if (room <= left) {
            y[t] = upper[t];
            left -= room;
        } else {
            y[t] += left;
            left = 0.0;
        }
    }
    return y;
}

namespace {

struct Draw {
    Player player;
    std::array<std::size_t, 2> window{};
    std::size_t redraws = 0;
    bool widened = false;
};

Draw draw_player(const ScenarioSpec& spec, std::size_t i) {
    const std::size_t T = spec.horizon;
    Rng rng(spec.seed, i);
    Draw d;
    const double m = rng.uniform(spec.mass_lo, spec.mass_hi);
    const auto tau = static_cast<std::size_t>(rng.uniform_int(4, static_cast<std::int64_t>(T)));
    const std::size_t left = tau / 2;
    const std::size_t right = tau - left;  // ceil(tau / 2)
    // 1-based centre; the window [h - left, h + right - 1] then lies in [1, T].
    const auto h = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(1 + left), static_cast<std::int64_t>(T + 1 - right)));
    d.window = {h - left - 1, h + right - 2};

    Vector lower(T, 0.0), upper(T, 0.0);
    const double share = m / static_cast<double>(tau);
    for (;;) {
        double cap = 0.0;
        for (std::size_t t = d.window[0]; t <= d.window[1]; ++t) {
            lower[t] = rng.uniform(0.0, share);
            upper[t] = rng.uniform(share, m);
            cap += upper[t];
        }
        if (cap >= m) break;
        if (++d.redraws >= spec.max_redraws) {
            for (std::size_t t = d.window[0]; t <= d.window[1]; ++t) upper[t] = m;
            d.widened = true;
            break;
        }
    }
    const double omega = rng.uniform(spec.omega_lo, spec.omega_hi);
    Vector pref = greedy_preference(m, lower, upper);
    d.player = Player{BoxSimplexSet::simplex(m, std::move(lower), std::move(upper)), QuadPrefUtility{omega, std::move(pref)}};
    return d;
}

}  // namespace

Scenario generate(const ScenarioSpec& spec) {
    spec.validate();
    const std::size_t I = spec.players;
    std::vector<Draw> draws(I);
    const auto count = static_cast<std::ptrdiff_t>(I);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) draws[static_cast<std::size_t>(i)] = draw_player(spec, static_cast<std::size_t>(i));

    std::vector<Player> players;
    std::vector<std::array<std::size_t, 2>> windows;
    std::size_t redraws = 0, widened = 0;
    for (Draw& d : draws) {
        players.push_back(std::move(d.player));
        windows.push_back(d.window);
        redraws += d.redraws;
        widened += d.widened ? 1 : 0;
    }
    GameInstance game(std::move(players), spec.price, spec.horizon, ev_coupling(spec.horizon, spec.capacity, spec.ramp));
    return Scenario{spec, std::move(game), std::move(windows), redraws, widened};
}

GameInstance replicate_players(const GameInstance& game, std::size_t copies) {
    std::vector<Player> players;
    for (const Player& p : game.players())
        for (std::size_t c = 0; c < copies; ++c) players.push_back(p);
    return GameInstance(std::move(players), game.costs(), game.coupling());
}

}  // namespace congeq
