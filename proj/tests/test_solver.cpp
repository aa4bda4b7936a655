#include <doctest.h>

#include <cmath>

#include "congeq/kernels.hpp"
#include "congeq/oracle.hpp"
#include "congeq/population.hpp"
#include "congeq/scenario.hpp"
#include "congeq/solver.hpp"
#include "support.hpp"

using namespace congeq;

namespace {

GameInstance single_player_game() {
    std::vector<Player> ps{{BoxSimplexSet::box({0.0}, {10.0}), {1.0, {2.0}}}};
    return GameInstance(ps, PiecewiseLinearCost::affine(0.0, 1.0), 1);
}

}  // namespace

TEST_CASE("residual") {
    IterateState a, b;
    a.x = Matrix(2, 2);
    a.lambda = {0.0, 0.0};
    b = a;
    CHECK(residual(a, b) == 0.0);
    b.x(0, 0) = 1.0;
    CHECK(residual(a, b) == 1.0);
    b = a;
    b.lambda = {3.0, 4.0};
    CHECK(residual(a, b) == 5.0);
    b = a;
    b.x(1, 0) = 1.0;
    CHECK(residual(a, b, Vector{1.0, 4.0}) == 2.0);
}

TEST_CASE("single player converges to the calculus minimizer") {
    // x c(x) + (x - 2)^2 with c(X) = X: 4x - 4 = 0.
    const GameInstance g = single_player_game();
    const SolveResult r = solve_vne(g);
    CHECK(r.converged);
    CHECK(r.final_residual <= 1e-3);
    CHECK(std::abs(r.profile(0, 0) - 1.0) <= 1e-3);
    const Vector br = best_response_oracle(g, 0, r.profile, GridSpec{1e-5});
    CHECK(std::abs(br[0] - 1.0) <= 1e-5);
}

TEST_CASE("zero step leaves the state unchanged") {
    Rng rng(31);
    const GameInstance g = testing::random_game(rng, {3, 2, true, true});
    SolverConfig cfg;
    cfg.init = InitRule::random;
    const EquilibriumProblem p = EquilibriumProblem::vne(g);
    IterateState s = initial_state(p, cfg);
    s.lambda.assign(s.lambda.size(), 0.7);
    const IterateState n = iterate(s, p, cfg, 0.0);
    CHECK(n.x == s.x);
    CHECK(n.lambda == s.lambda);
}

TEST_CASE("slack rows keep zero multipliers at a stationary state") {
    // Preferences jointly feasible, c = 0: the preference profile is stationary.
    std::vector<Player> ps(2, Player{BoxSimplexSet::box({0, 0}, {2, 2}), {1.0, {0.5, 1.0}}});
    CouplingConstraints cc{Matrix::from_rows({{1, 0}, {0, 1}}), {5.0, 5.0}};
    const GameInstance g(ps, PiecewiseLinearCost::constant(0.0), 2, cc);
    const EquilibriumProblem p = EquilibriumProblem::vne(g);
    SolverConfig cfg;
    const IterateState s = initial_state(p, cfg);
    const IterateState n = iterate(s, p, cfg, 0.5);
    CHECK(n.x == s.x);
    CHECK(n.lambda == Vector{0.0, 0.0});
}

TEST_CASE("two-player game: Nash 0.4, Wardrop 0.5") {
    const GameInstance g = testing::two_player_game();
    const SolveResult vne = solve_vne(g);
    const SolveResult svwe = solve_svwe(g);
    CHECK(vne.converged);
    CHECK(svwe.converged);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(std::abs(vne.profile(i, 0) - 0.4) <= 2e-3);
        CHECK(std::abs(svwe.profile(i, 0) - 0.5) <= 2e-3);
    }
    const OracleResult oracle = ne_fixed_point_oracle(g, GridSpec{1e-4}, 200);
    REQUIRE(oracle.converged);
    CHECK(std::abs(oracle.profile(0, 0) - 0.4) <= 2e-4);
    CHECK(std::abs(oracle.profile(1, 0) - 0.4) <= 2e-4);
}

TEST_CASE("one population of weight one is the nonatomic stationary point") {
    // x c(x) is dropped to c(x): x + 2(x - 2) = 0 gives x = 4/3.
    const GameInstance g = single_player_game();
    const SolveResult r = solve_svwe(identity_reduction(g));
    CHECK(r.converged);
    CHECK(std::abs(r.profile(0, 0) - 4.0 / 3.0) <= 2e-3);
}

TEST_CASE("zero cost and feasible preferences: everyone gets the preference") {
    Rng rng(32);
    for (int trial = 0; trial < 10; ++trial) {
        testing::RandomGameOptions o{4, 3, true, false};
        GameInstance base = testing::random_game(rng, o);
        const GameInstance g(base.players(), PiecewiseLinearCost::constant(0.0), 3);
        const SolveResult vne = solve_vne(g);
        const SolveResult svwe = solve_svwe(g);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t t = 0; t < 3; ++t) {
                CHECK(vne.profile(i, t) == doctest::Approx(g.player(i).utility.preference[t]).epsilon(1e-12));
                CHECK(svwe.profile(i, t) == doctest::Approx(g.player(i).utility.preference[t]).epsilon(1e-12));
            }
    }
}

TEST_CASE("sampled variational inequality certificate") {
    Rng rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        const GameInstance g = testing::random_game(rng, {3, 3, trial % 2 == 0, false});
        SolverConfig cfg;
        cfg.stop_tol = 1e-4;
        const SolveResult r = solve_vne(g, cfg);
        REQUIRE(r.converged);
        const SubgradientSelection h = h_map(r.profile, g);
        double worst = 0.0;
        for (int s = 0; s < 1000; ++s) {
            const ActionProfile z = testing::random_profile(rng, g);
            double v = 0.0;
            for (std::size_t i = 0; i < z.rows(); ++i)
                for (std::size_t t = 0; t < z.cols(); ++t) v += h.g(i, t) * (z(i, t) - r.profile(i, t));
            worst = std::min(worst, v);
        }
        CHECK(worst >= -10.0 * 1e-3);
    }
}

TEST_CASE("multipliers stay nonnegative and the trace is recorded") {
    Rng rng(34);
    const GameInstance g = testing::random_game(rng, {5, 3, true, true});
    SolverConfig cfg;
    cfg.record_trace = true;
    const EquilibriumProblem p = EquilibriumProblem::vne(g);
    IterateState s = initial_state(p, cfg);
    for (int k = 0; k < 200; ++k) {
        s = iterate(s, p, cfg);
        for (double l : s.lambda) CHECK(l >= 0.0);
    }
    const SolveResult r = solve(p, cfg);
    CHECK(r.trace.size() == r.iterations);
    CHECK(r.trace.back().residual == r.final_residual);
    if (r.converged) CHECK(r.final_residual <= cfg.stop_tol);
}

TEST_CASE("extrapolated and textbook multiplier updates agree at primal fixed points") {
    // Pinned sets keep X constant, so 2AX' - AX = AX and both updates read lambda + tau (AX - b).
    std::vector<Player> ps(3, Player{BoxSimplexSet::simplex(2.0, {0.5, 1.5}, {0.5, 1.5}), {1.0, {0.5, 1.5}}});
    CouplingConstraints cc{Matrix::from_rows({{1, 0}, {0, 1}, {1, 1}}), {1.0, 5.0, 6.5}};
    const GameInstance g(ps, PiecewiseLinearCost::affine(1.0, 0.5), 2, cc);
    const EquilibriumProblem p = EquilibriumProblem::vne(g);
    SolverConfig a, b;
    b.multiplier_update = MultiplierUpdate::textbook;
    IterateState sa = initial_state(p, a), sb = initial_state(p, b);
    for (int k = 0; k < 50; ++k) {
        sa = iterate(sa, p, a);
        sb = iterate(sb, p, b);
        CHECK(sa.lambda == sb.lambda);
    }
    CHECK(sa.lambda[0] > 0.0);
    CHECK(sa.lambda[1] == 0.0);
}

TEST_CASE("serial and parallel descent steps are bitwise identical") {
    const Scenario sc = generate([] {
        ScenarioSpec s;
        s.players = 64;
        return s;
    }());
    const EquilibriumProblem p = EquilibriumProblem::vne(sc.game);
    SolverConfig cfg;
    const IterateState s = initial_state(p, cfg);
    const PriceState prices = price_state(p.costs, s.aggregate, cfg.selection);
    const Vector dual(24, 0.3);
    Matrix serial(s.x.rows(), s.x.cols()), parallel(s.x.rows(), s.x.cols());
    kernels::descent_step_serial(p, s.x, prices, dual, 0.25, serial);
    for (int threads : {1, 2, 3, 8}) {
        kernels::descent_step_parallel(p, s.x, prices, dual, 0.25, parallel, threads);
        CHECK(parallel == serial);
    }
    SolverConfig one = cfg, many = cfg;
    one.threads = 1;
    many.threads = 4;
    one.max_iters = many.max_iters = 300;
    const SolveResult a = solve_vne(sc.game, one), b = solve_vne(sc.game, many);
    CHECK(a.profile == b.profile);
    CHECK(a.multipliers == b.multipliers);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("desk scenario satisfies the coupling constraints") {
    ScenarioSpec spec;
    spec.players = 200;
    const Scenario sc = generate(spec);
    const SolveResult r = solve_vne(sc.game);
    CHECK(r.converged);
    for (std::size_t t = 0; t < 24; ++t) CHECK(r.aggregate[t] <= 1400.0 + 1e-3);
    CHECK(std::abs(r.aggregate[23] - r.aggregate[0]) <= 50.0 + 1e-3);
    CHECK(is_feasible(r.profile, sc.game, 1e-3).feasible);
}

TEST_CASE("config validation") {
    SolverConfig c;
    c.stop_tol = 0.0;
    CHECK_THROWS(c.validate());
    c = SolverConfig{};
    c.max_iters = 0;
    CHECK_THROWS(c.validate());
    c = SolverConfig{};
    c.init = InitRule::given;
    CHECK_THROWS(c.validate());
}
