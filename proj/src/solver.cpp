#include "congeq/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "congeq/kernels.hpp"
#include "congeq/projection.hpp"
#include "congeq/rng.hpp"

namespace congeq {

void SolverConfig::validate() const {
    if (!(stop_tol > 0.0)) throw std::invalid_argument("stop_tol must be positive");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
    if (step_rule == StepRule::constant && !(step_constant >= 0.0))
        throw std::invalid_argument("constant step must be nonnegative");
    if (init == InitRule::given && !initial_profile) throw std::invalid_argument("init=given needs a profile");
}

EquilibriumProblem EquilibriumProblem::vne(const GameInstance& game) {
    EquilibriumProblem p;
    for (const Player& pl : game.players()) {
        p.sets.push_back(pl.set);
        p.utilities.push_back(pl.utility);
    }
    p.weights.assign(game.num_players(), 1.0);
    p.costs = game.costs();
    p.coupling = game.coupling();
    p.mode = Mode::atomic;
    return p;
}

EquilibriumProblem EquilibriumProblem::svwe(const GameInstance& game) {
    EquilibriumProblem p = vne(game);
    p.mode = Mode::nonatomic;
    return p;
}

EquilibriumProblem EquilibriumProblem::svwe(const AuxiliaryGame& aux) {
    EquilibriumProblem p;
    p.sets = aux.sets;
    p.utilities = aux.utilities;
    p.weights = aux.weights;
    p.costs = aux.costs;
    p.coupling = aux.coupling;
    p.mode = Mode::nonatomic;
    return p;
}

IterateState initial_state(const EquilibriumProblem& problem, const SolverConfig& config) {
    const std::size_t N = problem.rows();
    const std::size_t T = problem.horizon();
    IterateState s;
    s.x = Matrix(N, T);
    ProjectionWorkspace ws;
    Vector v(T);
    for (std::size_t n = 0; n < N; ++n) {
        const BoxSimplexSet& set = problem.sets[n];
        switch (config.init) {
            case InitRule::preferences:
                std::copy(problem.utilities[n].preference.begin(), problem.utilities[n].preference.end(), v.begin());
                break;
            case InitRule::random: {
                Rng rng(config.init_seed, n);
                for (std::size_t t = 0; t < T; ++t) v[t] = rng.uniform(set.lower[t], set.upper[t]);
                break;
            }
            case InitRule::given: {
                const Matrix& init = *config.initial_profile;
                if (init.rows() != N || init.cols() != T) throw std::invalid_argument("initial profile shape mismatch");
                std::copy(init.row(n).begin(), init.row(n).end(), v.begin());
                break;
            }
        }
        project_box_simplex(v, set, s.x.row(n), ws);
    }
    s.lambda = config.initial_multipliers.empty() ? Vector(problem.coupling_rows(), 0.0) : config.initial_multipliers;
    if (s.lambda.size() != problem.coupling_rows()) throw std::invalid_argument("initial multipliers size mismatch");
    project_nonneg(std::span<double>(s.lambda));
    s.aggregate = aggregate(s.x, problem.weights);
    s.k = 1;
    return s;
}

IterateState iterate(const IterateState& state, const EquilibriumProblem& problem, const SolverConfig& config,
                     double tau) {
    IterateState next;
    next.x = Matrix(state.x.rows(), state.x.cols());
    const PriceState prices = price_state(problem.costs, state.aggregate, config.selection);
    const Vector dual_price =
        problem.coupling ? problem.coupling->transpose_times(state.lambda) : Vector(problem.horizon(), 0.0);

    if (config.threads == 1)
        kernels::descent_step_serial(problem, state.x, prices, dual_price, tau, next.x);
    else
        kernels::descent_step_parallel(problem, state.x, prices, dual_price, tau, next.x, config.threads);

    next.aggregate = aggregate(next.x, problem.weights);
    next.lambda = state.lambda;
    if (problem.coupling) {
        const CouplingConstraints& cc = *problem.coupling;
        for (std::size_t r = 0; r < cc.rows(); ++r) {
            const double ax_next = dot(cc.matrix.row(r), next.aggregate);
            double step;
            if (config.multiplier_update == MultiplierUpdate::extrapolated) {
                const double ax_prev = dot(cc.matrix.row(r), state.aggregate);
                step = -(cc.rhs[r] - 2.0 * ax_next + ax_prev);
            } else {
                step = ax_next - cc.rhs[r];
            }
            next.lambda[r] = std::max(state.lambda[r] + tau * step, 0.0);
        }
    }
    next.k = state.k + 1;
    return next;
}

IterateState vne_iterate(const IterateState& state, const GameInstance& game, const SolverConfig& config) {
    return iterate(state, EquilibriumProblem::vne(game), config);
}

double residual(const IterateState& prev, const IterateState& next, std::span<const double> row_weights) {
    double s = 0.0;
    for (std::size_t r = 0; r < prev.lambda.size(); ++r) {
        const double d = next.lambda[r] - prev.lambda[r];
        s += d * d;
    }
    for (std::size_t n = 0; n < prev.x.rows(); ++n) {
        auto a = prev.x.row(n);
        auto b = next.x.row(n);
        double row = 0.0;
        for (std::size_t t = 0; t < a.size(); ++t) {
            const double d = b[t] - a[t];
            row += d * d;
        }
        s += row_weights.empty() ? row : row_weights[n] * row;
    }
    return std::sqrt(s);
}

namespace {

double primal_violation(const EquilibriumProblem& problem, const Vector& X) {
    if (!problem.coupling) return 0.0;
    double worst = 0.0;
    for (double v : problem.coupling->slack_violation(X)) worst = std::max(worst, v);
    return worst;
}

double gap_proxy(const EquilibriumProblem& problem, const IterateState& s) {
    if (!problem.coupling) return 0.0;
    return dot(s.lambda, problem.coupling->slack_violation(s.aggregate));
}

}  // namespace

SolveResult solve(const EquilibriumProblem& problem, const SolverConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const std::span<const double> row_weights =
        config.residual_metric == ResidualMetric::expanded ? std::span<const double>(problem.weights)
                                                           : std::span<const double>();
    SolveResult result;
    IterateState state = initial_state(problem, config);
    double res = std::numeric_limits<double>::infinity();
    std::size_t it = 0;
    while (it < config.max_iters) {
        IterateState next = iterate(state, problem, config);
        res = residual(state, next, row_weights);
        state = std::move(next);
        ++it;
        if (config.record_trace)
            result.trace.push_back({it, res, primal_violation(problem, state.aggregate), gap_proxy(problem, state)});
        if (res <= config.stop_tol) break;
    }
    result.profile = std::move(state.x);
    result.multipliers = std::move(state.lambda);
    result.aggregate = std::move(state.aggregate);
    result.iterations = it;
    result.final_residual = res;
    result.converged = res <= config.stop_tol;
    result.max_primal_violation = primal_violation(problem, result.aggregate);
    result.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
}

SolveResult solve_vne(const GameInstance& game, const SolverConfig& config) {
    return solve(EquilibriumProblem::vne(game), config);
}

SolveResult solve_svwe(const GameInstance& game, const SolverConfig& config) {
    return solve(EquilibriumProblem::svwe(game), config);
}

SolveResult solve_svwe(const AuxiliaryGame& aux, const SolverConfig& config) {
    return solve(EquilibriumProblem::svwe(aux), config);
}

}  // namespace congeq
