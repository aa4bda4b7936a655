#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "congeq/game.hpp"
#include "congeq/population.hpp"
#include "congeq/subgradient.hpp"

namespace congeq {

enum class StepRule { harmonic, constant };
enum class InitRule { preferences, random, given };
/// extrapolated: lambda <- (lambda - tau (b - 2 A X_{k+1} + A X_k))^+
/// textbook:     lambda <- (lambda + tau (A X_{k+1} - b))^+
enum class MultiplierUpdate { extrapolated, textbook };
/// population: ||(dlambda, dx)|| over the iterate rows as stored.
/// expanded:   rows weighted by their population size, i.e. the distance between the
///             expanded player profiles. Identical to `population` for atomic games.
enum class ResidualMetric { population, expanded };

struct SolverConfig {
    StepRule step_rule = StepRule::harmonic;
    double step_constant = 1e-2;
    double stop_tol = 1e-3;
    std::size_t max_iters = 200000;
    SelectionRule selection = SelectionRule::right;
    InitRule init = InitRule::preferences;
    std::uint64_t init_seed = 0;
    std::optional<Matrix> initial_profile;
    Vector initial_multipliers;
    MultiplierUpdate multiplier_update = MultiplierUpdate::extrapolated;
    ResidualMetric residual_metric = ResidualMetric::population;
    /// 0 = all available threads; 1 = the serial reference kernel.
    int threads = 0;
    bool record_trace = false;

    void validate() const;
    double step(std::size_t k) const { return step_rule == StepRule::harmonic ? 1.0 / static_cast<double>(k) : step_constant; }
};

/// The variational problem the projected descent runs on: one row per player (atomic,
/// map H, unit weights) or per population (nonatomic, map H', weights I_n).
struct EquilibriumProblem {
    std::vector<BoxSimplexSet> sets;
    std::vector<QuadPrefUtility> utilities;
    Vector weights;
    std::vector<PiecewiseLinearCost> costs;
    std::optional<CouplingConstraints> coupling;
    Mode mode = Mode::atomic;

    static EquilibriumProblem vne(const GameInstance& game);
    /// Identity reduction: each player replaced by a unit mass of nonatomic players.
    static EquilibriumProblem svwe(const GameInstance& game);
    static EquilibriumProblem svwe(const AuxiliaryGame& aux);

    std::size_t rows() const { return sets.size(); }
    std::size_t horizon() const { return costs.size(); }
    std::size_t coupling_rows() const { return coupling ? coupling->rows() : 0; }
};

struct IterateState {
    Matrix x;
    Vector lambda;
    Vector aggregate;
    std::size_t k = 1;  ///< index of the next step; the step size is config.step(k)
};

struct TraceRow {
    std::size_t iter = 0;
    double residual = 0.0;
    double max_primal_violation = 0.0;
    double gap_proxy = 0.0;  ///< lambda . (A X - b)
};

struct SolveResult {
    Matrix profile;
    Vector multipliers;
    Vector aggregate;
    std::size_t iterations = 0;
    double final_residual = 0.0;
    bool converged = false;
    double max_primal_violation = 0.0;
    double wall_ms = 0.0;
    std::vector<TraceRow> trace;
};

IterateState initial_state(const EquilibriumProblem& problem, const SolverConfig& config);

/// One pass of the projected descent with step tau:
///   x_n <- Proj_{X_n}(x_n - tau (g_n + A^T lambda)),  g_n from H or H' at the frozen X_k,
/// followed by the multiplier update. Rows are updated in parallel unless config.threads == 1.
IterateState iterate(const IterateState& state, const EquilibriumProblem& problem, const SolverConfig& config,
                     double tau);
inline IterateState iterate(const IterateState& state, const EquilibriumProblem& problem,
                            const SolverConfig& config) {
    return iterate(state, problem, config, config.step(state.k));
}

IterateState vne_iterate(const IterateState& state, const GameInstance& game, const SolverConfig& config);

/// ||(lambda', x') - (lambda, x)||_2; row_weights scales each squared row difference (empty = 1).
double residual(const IterateState& prev, const IterateState& next, std::span<const double> row_weights = {});

SolveResult solve(const EquilibriumProblem& problem, const SolverConfig& config);
SolveResult solve_vne(const GameInstance& game, const SolverConfig& config = {});
SolveResult solve_svwe(const GameInstance& game, const SolverConfig& config = {});
SolveResult solve_svwe(const AuxiliaryGame& aux, const SolverConfig& config = {});

}  // namespace congeq
