#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "congeq/bounds.hpp"
#include "congeq/population.hpp"
#include "congeq/scenario.hpp"
#include "congeq/solver.hpp"

namespace congeq::io {

using json = nlohmann::json;

/// Game plus the free-form `meta` block of a scenario file.
struct ScenarioDocument {
    GameInstance game;
    json meta = json::object();
};

json cost_to_json(const PiecewiseLinearCost& cost);
PiecewiseLinearCost cost_from_json(const json& j);

/// Player entry: {m, omega, window, lower, upper, pref}; m is omitted for a pure box.
json player_to_json(const Player& player);
Player player_from_json(const json& j, std::size_t horizon);

/// {capacity, ramp} when A has the EV structure, {matrix, rhs} otherwise, null without coupling.
json coupling_to_json(const std::optional<CouplingConstraints>& coupling, std::size_t horizon);
std::optional<CouplingConstraints> coupling_from_json(const json& j, std::size_t horizon);

/// Scenario schema {meta, price, coupling, players}. A shared cost is written as one piece
/// list; per-resource costs as a list of piece lists.
json game_to_json(const GameInstance& game, json meta = json::object());
ScenarioDocument game_from_json(const json& j);
json scenario_to_json(const Scenario& scenario);

json solve_result_to_json(const SolveResult& result);
SolveResult solve_result_from_json(const json& j);

/// Non-finite values are written as null.
json bounds_to_json(const BoundReport& report);
BoundReport bounds_from_json(const json& j);

json reduction_to_json(const AuxiliaryGame& aux, const ReductionReport& report);

json read_json(const std::filesystem::path& path);
/// Pretty-printed with sorted keys; throws std::runtime_error when the file cannot be written.
void write_json(const std::filesystem::path& path, const json& j);

struct CompareRow {
    std::size_t populations = 0;
    double rel_err_agg = 0.0;
    double wall_ms = 0.0;
    std::size_t iterations = 0;
    double K_value = kInf;
    double thm4_bound = kInf;
};

void write_aggregate_csv(const std::filesystem::path& path, std::span<const double> aggregate);
void write_compare_csv(const std::filesystem::path& path, const std::vector<CompareRow>& rows);
void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace);

/// FNV-1a over the compact dump; object keys are sorted, so field order does not matter.
std::uint64_t config_hash(const json& config);

class RunManifest {
public:
    RunManifest(std::string command, json config);

    void set_seed(std::uint64_t seed) { seed_ = seed; }
    void add_phase(const std::string& name, double wall_ms) { phases_.emplace_back(name, wall_ms); }
    void add_iterations(const std::string& name, std::size_t iterations) { iterations_.emplace_back(name, iterations); }
    void add_output(const std::filesystem::path& path) { outputs_.push_back(path.string()); }

    json to_json() const;
    /// Writes the manifest; the manifest file itself is listed among the outputs.
    void write(const std::filesystem::path& path);

private:
    std::string command_;
    json config_;
    std::uint64_t seed_ = 0;
    std::string started_;
    std::vector<std::pair<std::string, double>> phases_;
    std::vector<std::pair<std::string, std::size_t>> iterations_;
    std::vector<std::string> outputs_;
};

std::string utc_timestamp();

}  // namespace congeq::io
