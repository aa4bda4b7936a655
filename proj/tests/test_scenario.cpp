#include <doctest.h>

#include "congeq/scenario.hpp"

using namespace congeq;

TEST_CASE("scenario draws stay in range") {
    ScenarioSpec spec;
    spec.players = 500;
    spec.seed = 7;
    const Scenario sc = generate(spec);
    REQUIRE(sc.game.num_players() == 500);
    for (std::size_t i = 0; i < 500; ++i) {
        const Player& p = sc.game.player(i);
        const double m = *p.set.total;
        CHECK(m >= 1.0);
        CHECK(m <= 30.0);
        CHECK(p.utility.weight >= 1.0);
        CHECK(p.utility.weight <= 10.0);
        const auto [first, last] = sc.windows[i];
        const std::size_t tau = last - first + 1;
        CHECK(tau >= 4);
        CHECK(last < 24);
        double lower_sum = 0.0, upper_sum = 0.0, pref_sum = 0.0;
        for (std::size_t t = 0; t < 24; ++t) {
            const bool inside = t >= first && t <= last;
            if (!inside) {
                CHECK(p.set.lower[t] == 0.0);
                CHECK(p.set.upper[t] == 0.0);
            } else {
                CHECK(p.set.lower[t] <= m / static_cast<double>(tau));
                CHECK(p.set.upper[t] >= m / static_cast<double>(tau));
                CHECK(p.set.upper[t] <= m);
            }
            lower_sum += p.set.lower[t];
            upper_sum += p.set.upper[t];
            pref_sum += p.utility.preference[t];
            CHECK(p.utility.preference[t] >= p.set.lower[t]);
            CHECK(p.utility.preference[t] <= p.set.upper[t]);
        }
        CHECK(upper_sum >= m);
        CHECK(pref_sum == doctest::Approx(m).epsilon(1e-12));
        CHECK(p.set.contains(p.utility.preference));
    }
}

TEST_CASE("coupling rows and tariff") {
    ScenarioSpec spec;
    spec.players = 2;
    const Scenario sc = generate(spec);
    const CouplingConstraints& cc = *sc.game.coupling();
    REQUIRE(cc.rows() == 26);
    for (std::size_t r = 0; r < 24; ++r) CHECK(cc.rhs[r] == 1400.0);
    CHECK(cc.rhs[24] == 50.0);
    CHECK(cc.rhs[25] == 50.0);
    Vector X(24, 0.0);
    X[23] = 60.0;
    CHECK(cc.slack_violation(X)[24] == doctest::Approx(10.0));
    X[23] = 0.0;
    X[0] = 60.0;
    CHECK(cc.slack_violation(X)[25] == doctest::Approx(10.0));
    CHECK(sc.game.shared_cost());
    CHECK(sc.game.cost(0) == default_price());
}

TEST_CASE("generation is deterministic and prefix-stable") {
    ScenarioSpec a;
    a.players = 50;
    a.seed = 3;
    ScenarioSpec b = a;
    b.players = 120;
    const Scenario sa = generate(a), sa2 = generate(a), sb = generate(b);
    CHECK(sa.game == sa2.game);
    for (std::size_t i = 0; i < 50; ++i) CHECK(sa.game.player(i) == sb.game.player(i));
    ScenarioSpec c = a;
    c.seed = 4;
    CHECK_FALSE(generate(c).game.player(0) == sa.game.player(0));
}

TEST_CASE("greedy preference fills the earliest slots") {
    const Vector y = greedy_preference(5.0, Vector{1, 0, 0, 1}, Vector{2, 3, 3, 2});
    CHECK(y == Vector{2, 2, 0, 1});
}

TEST_CASE("invalid specs") {
    ScenarioSpec s;
    s.horizon = 3;
    CHECK_THROWS(generate(s));
    s = ScenarioSpec{};
    s.players = 0;
    CHECK_THROWS(generate(s));
}

TEST_CASE("minimal scenarios") {
    ScenarioSpec s;
    s.players = 1;
    s.horizon = 4;
    const Scenario sc = generate(s);
    CHECK(sc.windows[0][0] == 0);
    CHECK(sc.windows[0][1] == 3);
}
