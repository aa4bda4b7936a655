// Serial reference vs OpenMP kernels. Threads default to omp_get_max_threads().
#include <benchmark/benchmark.h>

#include "congeq/kernels.hpp"
#include "congeq/population.hpp"
#include "congeq/projection.hpp"
#include "congeq/rng.hpp"
#include "congeq/scenario.hpp"
#include "congeq/solver.hpp"

using namespace congeq;

namespace {

struct StepFixture {
    EquilibriumProblem problem;
    Matrix x;
    PriceState prices;
    Vector dual;

    explicit StepFixture(std::size_t players) {
        ScenarioSpec spec;
        spec.players = players;
        const GameInstance g = generate(spec).game;
        problem = EquilibriumProblem::vne(g);
        x = Matrix(g.num_players(), g.horizon());
        for (std::size_t i = 0; i < g.num_players(); ++i)
            for (std::size_t t = 0; t < g.horizon(); ++t) x(i, t) = g.player(i).utility.preference[t];
        prices = price_state(problem.costs, aggregate(x), SelectionRule::right);
        dual.assign(g.horizon(), 0.01);
    }
};

void BM_DescentSerial(benchmark::State& state) {
    StepFixture f(static_cast<std::size_t>(state.range(0)));
    Matrix next(f.x.rows(), f.x.cols());
    for (auto _ : state) {
        kernels::descent_step_serial(f.problem, f.x, f.prices, f.dual, 0.01, next);
        benchmark::DoNotOptimize(next.data().data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DescentParallel(benchmark::State& state) {
    StepFixture f(static_cast<std::size_t>(state.range(0)));
    Matrix next(f.x.rows(), f.x.cols());
    const int threads = kernels::resolve_threads(0);
    for (auto _ : state) {
        kernels::descent_step_parallel(f.problem, f.x, f.prices, f.dual, 0.01, next, threads);
        benchmark::DoNotOptimize(next.data().data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
    state.counters["threads"] = threads;
}

struct AssignFixture {
    std::vector<Vector> points, centers;
    explicit AssignFixture(std::size_t players, std::size_t k) {
        ScenarioSpec spec;
        spec.players = players;
        points = param_vectors(generate(spec).game);
        for (std::size_t j = 0; j < k; ++j) centers.push_back(points[j * players / k]);
    }
};

void BM_AssignSerial(benchmark::State& state) {
    AssignFixture f(static_cast<std::size_t>(state.range(0)), 50);
    std::vector<std::size_t> a;
    for (auto _ : state) benchmark::DoNotOptimize(kernels::assign_nearest_serial(f.points, f.centers, a));
}

void BM_AssignParallel(benchmark::State& state) {
    AssignFixture f(static_cast<std::size_t>(state.range(0)), 50);
    std::vector<std::size_t> a;
    const int threads = kernels::resolve_threads(0);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::assign_nearest_parallel(f.points, f.centers, a, threads));
    state.counters["threads"] = threads;
}

void BM_Projection(benchmark::State& state) {
    ScenarioSpec spec;
    spec.players = 1;
    spec.horizon = static_cast<std::size_t>(state.range(0));
    const GameInstance g = generate(spec).game;
    const BoxSimplexSet& set = g.player(0).set;
    Rng rng(3);
    Vector v(set.dim()), out(set.dim());
    ProjectionWorkspace ws;
    for (double& e : v) e = rng.uniform(-5, 20);
    for (auto _ : state) {
        project_box_simplex(v, set, out, ws);
        benchmark::DoNotOptimize(out.data());
    }
}

}  // namespace

BENCHMARK(BM_DescentSerial)->Arg(200)->Arg(2000)->Arg(20000);
BENCHMARK(BM_DescentParallel)->Arg(200)->Arg(2000)->Arg(20000);
BENCHMARK(BM_AssignSerial)->Arg(200)->Arg(2000)->Arg(20000);
BENCHMARK(BM_AssignParallel)->Arg(200)->Arg(2000)->Arg(20000);
BENCHMARK(BM_Projection)->Arg(24)->Arg(96)->Arg(384);

BENCHMARK_MAIN();
