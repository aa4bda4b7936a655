#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "congeq/io.hpp"
#include "support.hpp"

using namespace congeq;
namespace fs = std::filesystem;

TEST_CASE("scenario round trip") {
    ScenarioSpec spec;
    spec.players = 25;
    const Scenario sc = generate(spec);
    const io::json j = io::scenario_to_json(sc);
    CHECK(j.at("coupling").at("capacity") == 1400.0);
    CHECK(j.at("meta").at("generator") == Rng::kName);
    const io::ScenarioDocument back = io::game_from_json(io::json::parse(j.dump()));
    CHECK(back.game == sc.game);
    CHECK(io::game_to_json(back.game, back.meta).dump() == j.dump());
}

TEST_CASE("general games round trip") {
    Rng rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        const GameInstance g = testing::random_game(rng, {3, 3, trial % 2 == 0, trial % 3 == 0});
        const io::json j = io::game_to_json(g);
        const io::ScenarioDocument back = io::game_from_json(io::json::parse(j.dump()));
        CHECK(back.game == g);
    }
}

TEST_CASE("results and bounds round trip") {
    SolveResult r;
    r.profile = Matrix::from_rows({{0.1, 0.2}, {1.0 / 3.0, 2.0}});
    r.multipliers = {0.0, 1e-17};
    r.aggregate = {0.1 + 1.0 / 3.0, 2.2};
    r.iterations = 17;
    r.final_residual = 9.9e-4;
    r.converged = true;
    r.max_primal_violation = 1e-9;
    r.wall_ms = 12.5;
    const SolveResult back = io::solve_result_from_json(io::json::parse(io::solve_result_to_json(r).dump()));
    CHECK(back.profile == r.profile);
    CHECK(back.multipliers == r.multipliers);
    CHECK(back.aggregate == r.aggregate);
    CHECK(back.iterations == 17);
    CHECK(back.final_residual == r.final_residual);
    CHECK(back.converged);

    BoundReport b = full_report(testing::two_player_game(), 0.0, 0.0, RhoOptions{50});
    b.thm3_agg = kInf;
    const io::json jb = io::bounds_to_json(b);
    CHECK(jb.at("thm3_agg").is_null());
    const BoundReport bb = io::bounds_from_json(io::json::parse(jb.dump()));
    CHECK(io::bounds_to_json(bb) == jb);
    CHECK(bb.thm3_agg == kInf);
}

TEST_CASE("config hash ignores key order") {
    const io::json a = io::json::parse(R"({"tol": 0.001, "mode": "vne", "n": [5, 10]})");
    const io::json b = io::json::parse(R"({"n": [5, 10], "mode": "vne", "tol": 0.001})");
    CHECK(io::config_hash(a) == io::config_hash(b));
    CHECK(io::config_hash(a) != io::config_hash(io::json::parse(R"({"tol": 0.001, "mode": "svwe", "n": [5, 10]})")));
}

TEST_CASE("files and manifest") {
    const fs::path dir = fs::temp_directory_path() / "congeq_io_test";
    fs::create_directories(dir);
    io::write_aggregate_csv(dir / "agg.csv", Vector{1.5, 2.0});
    std::ifstream in(dir / "agg.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == "t,X_t\n1,1.5\n2,2\n");

    io::write_compare_csv(dir / "cmp.csv", {{5, 0.1, 3.0, 10, kInf, 2.0}});
    std::ifstream cin(dir / "cmp.csv");
    std::string header;
    std::getline(cin, header);
    CHECK(header == "N,rel_err_agg,wall_ms,iterations,K_value,thm4_bound");

    io::RunManifest m("solve", {{"tol", 1e-3}});
    m.add_phase("solve", 1.0);
    m.add_output(dir / "agg.csv");
    m.write(dir / "manifest.json");
    const io::json mj = io::read_json(dir / "manifest.json");
    CHECK(mj.at("outputs").size() == 2);
    CHECK(mj.at("config_hash").get<std::string>().size() == 16);
    CHECK_THROWS(io::write_json("/nonexistent-dir/x.json", mj));
    fs::remove_all(dir);
}
