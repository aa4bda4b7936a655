// congeq: generate EV scenarios, solve for VNE / SVWE, compare population reductions.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "congeq/bounds.hpp"
#include "congeq/io.hpp"
#include "congeq/population.hpp"
#include "congeq/scenario.hpp"
#include "congeq/solver.hpp"

namespace fs = std::filesystem;
using namespace congeq;
using io::json;

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;

double ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
    fs::path out = p;
    out.replace_extension();
    out += suffix;
    return out;
}

struct SolveOpts {
    double tol = 1e-3;
    std::size_t max_iters = 200000;
    int threads = 0;
    std::uint64_t kmeans_seed = 0;
};

SolverConfig solver_config(const SolveOpts& o) {
    SolverConfig c;
    c.stop_tol = o.tol;
    c.max_iters = o.max_iters;
    c.threads = o.threads;
    return c;
}

void add_solve_flags(CLI::App* cmd, SolveOpts& o) {
    cmd->add_option("--tol", o.tol, "stopping tolerance on the iterate change")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iters", o.max_iters, "iteration cap");
    cmd->add_option("--threads", o.threads, "solver threads (0 = all cores, 1 = serial kernel)");
    cmd->add_option("--kmeans-seed", o.kmeans_seed, "seed of the k-means++ initialization");
}

struct Reduction {
    AuxiliaryGame aux;
    ReductionReport report;
};

Reduction reduce(const GameInstance& game, std::size_t populations, std::uint64_t seed, int threads) {
    KMeansOptions ko;
    ko.clusters = populations;
    ko.seed = seed;
    ko.threads = threads;
    const KMeansResult km = kmeans_cluster(param_vectors(game), ko);
    Reduction r{build_aux_game(game, km.assignment), {}};
    r.report = reduction_report(game, r.aux);
    r.report.kmeans_objective = km.objective;
    return r;
}

double relative_error(const Vector& approx, const Vector& exact) {
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < exact.size(); ++t) {
        num += (approx[t] - exact[t]) * (approx[t] - exact[t]);
        den += exact[t] * exact[t];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

int cmd_generate(std::size_t players, std::size_t horizon, std::uint64_t seed, double capacity, double ramp,
                 const fs::path& out) {
    const auto start = std::chrono::steady_clock::now();
    ScenarioSpec spec;
    spec.players = players;
    spec.horizon = horizon;
    spec.seed = seed;
    spec.capacity = capacity;
    spec.ramp = ramp;
    const Scenario sc = generate(spec);
    io::write_json(out, io::scenario_to_json(sc));

    io::RunManifest manifest("generate", {{"players", players}, {"horizon", horizon}, {"seed", seed},
                                          {"capacity", capacity}, {"ramp", ramp}});
    manifest.set_seed(seed);
    manifest.add_phase("generate", ms_since(start));
    manifest.add_output(out);
    manifest.write(with_suffix(out, ".manifest.json"));
    std::cout << "wrote " << out.string() << " (" << players << " players, " << sc.redraws << " bound redraws)\n";
    return kExitConverged;
}

int cmd_solve(const fs::path& game_path, const std::string& mode, std::size_t populations, const SolveOpts& o,
              const fs::path& out, const fs::path& trace_path) {
    auto start = std::chrono::steady_clock::now();
    const io::ScenarioDocument doc = io::game_from_json(io::read_json(game_path));
    const GameInstance& game = doc.game;
    io::RunManifest manifest("solve", {{"game", game_path.string()}, {"mode", mode}, {"populations", populations},
                                       {"tol", o.tol}, {"max_iters", o.max_iters}, {"kmeans_seed", o.kmeans_seed}});
    manifest.set_seed(doc.meta.value("seed", std::uint64_t{0}));
    manifest.add_phase("load", ms_since(start));

    SolverConfig cfg = solver_config(o);
    cfg.record_trace = !trace_path.empty();
    SolveResult result;
    json extra = json::object();
    if (mode == "vne") {
        result = solve_vne(game, cfg);
    } else {
        start = std::chrono::steady_clock::now();
        const std::size_t N = populations == 0 ? game.num_players() : populations;
        const Reduction red = reduce(game, N, o.kmeans_seed, o.threads);
        manifest.add_phase("cluster", ms_since(start));
        result = solve_svwe(red.aux, cfg);
        extra = io::reduction_to_json(red.aux, red.report);
    }
    manifest.add_phase("solve", result.wall_ms);
    manifest.add_iterations(mode, result.iterations);

    json j = io::solve_result_to_json(result);
    j["mode"] = mode;
    if (!extra.empty()) j["reduction"] = std::move(extra);
    io::write_json(out, j);
    manifest.add_output(out);
    const fs::path csv = with_suffix(out, ".aggregate.csv");
    io::write_aggregate_csv(csv, result.aggregate);
    manifest.add_output(csv);
    if (!trace_path.empty()) {
        io::write_trace_csv(trace_path, result.trace);
        manifest.add_output(trace_path);
    }
    manifest.write(with_suffix(out, ".manifest.json"));
    std::cout << mode << ": " << result.iterations << " iterations, residual " << result.final_residual
              << (result.converged ? " (converged)" : " (NOT converged)") << ", " << result.wall_ms << " ms\n";
    return result.converged ? kExitConverged : kExitNotConverged;
}

int cmd_compare(const fs::path& game_path, const std::vector<std::size_t>& pops, const SolveOpts& o,
                const fs::path& dir, std::size_t rho_iters) {
    fs::create_directories(dir);
    const io::ScenarioDocument doc = io::game_from_json(io::read_json(game_path));
    const GameInstance& game = doc.game;
    io::RunManifest manifest("compare", {{"game", game_path.string()}, {"populations", pops}, {"tol", o.tol},
                                         {"max_iters", o.max_iters}, {"kmeans_seed", o.kmeans_seed},
                                         {"rho_iters", rho_iters}});
    manifest.set_seed(doc.meta.value("seed", std::uint64_t{0}));
    const SolverConfig cfg = solver_config(o);

    const SolveResult vne = solve_vne(game, cfg);
    manifest.add_phase("vne", vne.wall_ms);
    manifest.add_iterations("vne", vne.iterations);
    io::write_json(dir / "vne.json", io::solve_result_to_json(vne));
    manifest.add_output(dir / "vne.json");
    if (!vne.converged) {
        std::cerr << "VNE did not converge: " << vne.iterations << " iterations, residual " << vne.final_residual
                  << ", max coupling violation " << vne.max_primal_violation << "\n";
        manifest.write(dir / "manifest.json");
        return kExitNotConverged;
    }

    auto start = std::chrono::steady_clock::now();
    BoundReport base = compute_constants(game);
    const RhoResult rho = compute_rho(game, base, RhoOptions{rho_iters});
    base.rho = rho.rho;
    base.rho_defined = rho.defined;
    base.rho_capped = rho.capped;
    manifest.add_phase("constants", ms_since(start));

    std::vector<io::CompareRow> rows;
    std::vector<Vector> aggregates{vne.aggregate};
    bool all_converged = true;
    for (std::size_t N : pops) {
        start = std::chrono::steady_clock::now();
        const Reduction red = reduce(game, N, o.kmeans_seed, o.threads);
        manifest.add_phase("cluster_" + std::to_string(N), ms_since(start));
        const SolveResult svwe = solve_svwe(red.aux, cfg);
        manifest.add_phase("svwe_" + std::to_string(N), svwe.wall_ms);
        manifest.add_iterations("svwe_" + std::to_string(N), svwe.iterations);
        all_converged = all_converged && svwe.converged;

        BoundReport b = base;
        theorem_bounds(b, red.report.delta_x_max, red.report.delta_u_max);
        const fs::path bpath = dir / ("bounds_" + std::to_string(N) + ".json");
        io::write_json(bpath, {{"bounds", io::bounds_to_json(b)}, {"reduction", io::reduction_to_json(red.aux, red.report)},
                               {"svwe", io::solve_result_to_json(svwe)}});
        manifest.add_output(bpath);
        rows.push_back({N, relative_error(svwe.aggregate, vne.aggregate), svwe.wall_ms, svwe.iterations, b.K_value,
                        b.thm4_agg});
        aggregates.push_back(svwe.aggregate);
        std::cout << "N=" << N << ": rel_err " << rows.back().rel_err_agg << ", " << svwe.wall_ms << " ms"
                  << (svwe.converged ? "" : " (NOT converged)") << "\n";
    }
    io::write_compare_csv(dir / "compare.csv", rows);
    manifest.add_output(dir / "compare.csv");

    // Aggregate load per slot for the VNE and every reduction.
    {
        std::ofstream out(dir / "profiles.csv");
        out.precision(17);
        out << "t,vne";
        for (std::size_t N : pops) out << ",svwe_" << N;
        out << '\n';
        for (std::size_t t = 0; t < game.horizon(); ++t) {
            out << t + 1;
            for (const Vector& X : aggregates) out << ',' << X[t];
            out << '\n';
        }
    }
    manifest.add_output(dir / "profiles.csv");
    manifest.write(dir / "manifest.json");
    std::cout << "VNE: " << vne.iterations << " iterations, " << vne.wall_ms << " ms\n";
    return all_converged ? kExitConverged : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equilibria of coupled congestion games and their population approximations"};
    app.require_subcommand(1);

    std::size_t players = 200, horizon = 24, populations = 0, rho_iters = 2000;
    std::uint64_t seed = 1;
    double capacity = 1400.0, ramp = 50.0;
    fs::path out, game_path, trace_path;
    std::string mode = "vne";
    std::vector<std::size_t> pops{5, 10, 20, 50};
    SolveOpts opts;

    auto* gen = app.add_subcommand("generate", "draw an EV-charging scenario");
    gen->add_option("--players", players, "number of households")->check(CLI::PositiveNumber);
    gen->add_option("--horizon", horizon, "number of time slots")->check(CLI::Range(4, 1 << 20));
    gen->add_option("--seed", seed, "scenario seed");
    gen->add_option("--capacity", capacity, "per-slot capacity");
    gen->add_option("--ramp", ramp, "bound on |X_T - X_1|");
    gen->add_option("--out", out, "scenario JSON")->required();

    auto* sol = app.add_subcommand("solve", "compute a VNE or an SVWE");
    sol->add_option("--game", game_path, "scenario JSON")->required()->check(CLI::ExistingFile);
    sol->add_option("--mode", mode, "vne or svwe")->check(CLI::IsMember({"vne", "svwe"}));
    sol->add_option("--populations", populations, "number of populations for svwe (default: one per player)");
    sol->add_option("--out", out, "results JSON")->required();
    sol->add_option("--trace", trace_path, "per-iteration convergence CSV");
    add_solve_flags(sol, opts);

    auto* cmp = app.add_subcommand("compare", "VNE against SVWE for several population counts");
    cmp->add_option("--game", game_path, "scenario JSON")->required()->check(CLI::ExistingFile);
    cmp->add_option("--populations", pops, "population counts")->delimiter(',');
    cmp->add_option("--out", out, "output directory")->required();
    cmp->add_option("--rho-iters", rho_iters, "ascent iterations for the interior margin");
    add_solve_flags(cmp, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*gen) return cmd_generate(players, horizon, seed, capacity, ramp, out);
        if (*sol) return cmd_solve(game_path, mode, populations, opts, out, trace_path);
        if (*cmp) return cmd_compare(game_path, pops, opts, out, rho_iters);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
