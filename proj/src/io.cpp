#include "congeq/io.hpp"

#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "congeq/rng.hpp"

namespace congeq::io {

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double number_or_inf(const json& j) { return j.is_null() ? kInf : j.get<double>(); }

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(Vector(m.row(i).begin(), m.row(i).end()));
    return rows;
}

Matrix matrix_from_json(const json& j) { return Matrix::from_rows(j.get<std::vector<Vector>>()); }

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << std::setprecision(17);
    return out;
}

}  // namespace

json cost_to_json(const PiecewiseLinearCost& cost) {
    json pieces = json::array();
    for (const auto& p : cost.pieces()) pieces.push_back({{"threshold", p.threshold}, {"slope", p.slope}, {"value", p.value}});
    return pieces;
}

PiecewiseLinearCost cost_from_json(const json& j) {
    std::vector<PiecewiseLinearCost::Piece> pieces;
    for (const json& p : j) pieces.push_back({p.at("threshold").get<double>(), p.at("slope").get<double>(), p.at("value").get<double>()});
    return PiecewiseLinearCost(std::move(pieces));
}

json player_to_json(const Player& player) {
    const BoxSimplexSet& s = player.set;
    std::size_t first = s.dim(), last = 0;
    for (std::size_t t = 0; t < s.dim(); ++t)
        if (s.upper[t] > 0.0) {
            first = std::min(first, t);
            last = t;
        }
    if (first == s.dim()) first = 0;
    json j = {{"omega", player.utility.weight},
              {"window", {first, last}},
              {"lower", s.lower},
              {"upper", s.upper},
              {"pref", player.utility.preference}};
    if (s.total) j["m"] = *s.total;
    return j;
}

Player player_from_json(const json& j, std::size_t horizon) {
    Player p;
    p.set.lower = j.at("lower").get<Vector>();
    p.set.upper = j.at("upper").get<Vector>();
    if (j.contains("m") && !j.at("m").is_null()) p.set.total = j.at("m").get<double>();
    p.utility.weight = j.at("omega").get<double>();
    p.utility.preference = j.at("pref").get<Vector>();
    if (p.set.lower.size() != horizon || p.set.upper.size() != horizon || p.utility.preference.size() != horizon)
        throw std::invalid_argument("player vectors must have one entry per resource");
    return p;
}

json coupling_to_json(const std::optional<CouplingConstraints>& coupling, std::size_t horizon) {
    if (!coupling) return nullptr;
    const CouplingConstraints& cc = *coupling;
    if (cc.rows() == horizon + 2 && horizon >= 2 && cc.rhs[horizon] == cc.rhs[horizon + 1]) {
        const CouplingConstraints ev = ev_coupling(horizon, cc.rhs[0], cc.rhs[horizon]);
        if (ev == cc) return {{"capacity", cc.rhs[0]}, {"ramp", cc.rhs[horizon]}};
    }
    return {{"matrix", matrix_to_json(cc.matrix)}, {"rhs", cc.rhs}};
}

std::optional<CouplingConstraints> coupling_from_json(const json& j, std::size_t horizon) {
    if (j.is_null()) return std::nullopt;
    if (j.contains("capacity"))
        return ev_coupling(horizon, j.at("capacity").get<double>(), j.at("ramp").get<double>());
    CouplingConstraints cc{matrix_from_json(j.at("matrix")), j.at("rhs").get<Vector>()};
    if (cc.matrix.cols() != horizon || cc.matrix.rows() != cc.rhs.size())
        throw std::invalid_argument("coupling matrix shape mismatch");
    return cc;
}

json game_to_json(const GameInstance& game, json meta) {
    meta["I"] = game.num_players();
    meta["T"] = game.horizon();
    json price;
    if (game.shared_cost()) {
        price = cost_to_json(game.cost(0));
    } else {
        price = json::array();
        for (const auto& c : game.costs()) price.push_back(cost_to_json(c));
    }
    json players = json::array();
    for (const Player& p : game.players()) players.push_back(player_to_json(p));
    return {{"meta", std::move(meta)},
            {"price", std::move(price)},
            {"coupling", coupling_to_json(game.coupling(), game.horizon())},
            {"players", std::move(players)}};
}

ScenarioDocument game_from_json(const json& j) {
    const json& meta = j.at("meta");
    const auto T = meta.at("T").get<std::size_t>();
    std::vector<Player> players;
    for (const json& p : j.at("players")) players.push_back(player_from_json(p, T));
    if (meta.contains("I") && meta.at("I").get<std::size_t>() != players.size())
        throw std::invalid_argument("meta.I does not match the player list");
    const json& price = j.at("price");
    std::vector<PiecewiseLinearCost> costs;
    if (!price.empty() && price.front().is_array()) {
        for (const json& c : price) costs.push_back(cost_from_json(c));
        if (costs.size() != T) throw std::invalid_argument("need one price per resource");
    } else {
        costs.assign(T, cost_from_json(price));
    }
    auto coupling = coupling_from_json(j.contains("coupling") ? j.at("coupling") : json(nullptr), T);
    return {GameInstance(std::move(players), std::move(costs), std::move(coupling)), meta};
}

json scenario_to_json(const Scenario& scenario) {
    json meta = {{"seed", scenario.spec.seed},
                 {"generator", Rng::kName},
                 {"redraws", scenario.redraws},
                 {"widened", scenario.widened}};
    json doc = game_to_json(scenario.game, std::move(meta));
    for (std::size_t i = 0; i < scenario.windows.size(); ++i) doc["players"][i]["window"] = scenario.windows[i];
    return doc;
}

json solve_result_to_json(const SolveResult& r) {
    return {{"profile", matrix_to_json(r.profile)},
            {"multipliers", r.multipliers},
            {"aggregate", r.aggregate},
            {"iterations", r.iterations},
            {"residual", number_or_null(r.final_residual)},
            {"converged", r.converged},
            {"max_primal_violation", r.max_primal_violation},
            {"wall_ms", r.wall_ms}};
}

SolveResult solve_result_from_json(const json& j) {
    SolveResult r;
    r.profile = matrix_from_json(j.at("profile"));
    r.multipliers = j.at("multipliers").get<Vector>();
    r.aggregate = j.value("aggregate", Vector{});
    r.iterations = j.at("iterations").get<std::size_t>();
    r.final_residual = number_or_inf(j.at("residual"));
    r.converged = j.at("converged").get<bool>();
    r.max_primal_violation = j.value("max_primal_violation", 0.0);
    r.wall_ms = j.value("wall_ms", 0.0);
    return r;
}

json bounds_to_json(const BoundReport& r) {
    json B_u = json::array();
    for (double v : r.B_u) B_u.push_back(number_or_null(v));
    return {{"m", r.m}, {"M", r.M}, {"C", r.C}, {"B_c", r.B_c}, {"B_u", std::move(B_u)}, {"B_u_max", r.B_u_max},
            {"B_f", r.B_f}, {"alpha", number_or_null(r.alpha)}, {"beta", number_or_null(r.beta)},
            {"players", r.players}, {"horizon", r.horizon}, {"rho", r.rho}, {"rho_defined", r.rho_defined},
            {"rho_capped", r.rho_capped}, {"delta_x", r.delta_x}, {"delta_u", r.delta_u},
            {"K_value", number_or_null(r.K_value)}, {"K_applicable", r.K_applicable},
            {"thm1_x", number_or_null(r.thm1_x)}, {"thm1_agg", number_or_null(r.thm1_agg)},
            {"thm2_x", number_or_null(r.thm2_x)}, {"thm2_agg", number_or_null(r.thm2_agg)},
            {"thm3_x", number_or_null(r.thm3_x)}, {"thm3_agg", number_or_null(r.thm3_agg)},
            {"thm4_x", number_or_null(r.thm4_x)}, {"thm4_agg", number_or_null(r.thm4_agg)}};
}

BoundReport bounds_from_json(const json& j) {
    BoundReport r;
    r.m = j.at("m").get<double>();
    r.M = j.at("M").get<double>();
    r.C = j.at("C").get<double>();
    r.B_c = j.at("B_c").get<double>();
    for (const json& v : j.at("B_u")) r.B_u.push_back(number_or_inf(v));
    r.B_u_max = j.at("B_u_max").get<double>();
    r.B_f = j.at("B_f").get<double>();
    r.alpha = number_or_inf(j.at("alpha"));
    r.beta = number_or_inf(j.at("beta"));
    r.players = j.at("players").get<std::size_t>();
    r.horizon = j.at("horizon").get<std::size_t>();
    r.rho = j.at("rho").get<double>();
    r.rho_defined = j.at("rho_defined").get<bool>();
    r.rho_capped = j.at("rho_capped").get<bool>();
    r.delta_x = j.at("delta_x").get<double>();
    r.delta_u = j.at("delta_u").get<double>();
    r.K_value = number_or_inf(j.at("K_value"));
    r.K_applicable = j.at("K_applicable").get<bool>();
    r.thm1_x = number_or_inf(j.at("thm1_x"));
    r.thm1_agg = number_or_inf(j.at("thm1_agg"));
    r.thm2_x = number_or_inf(j.at("thm2_x"));
    r.thm2_agg = number_or_inf(j.at("thm2_agg"));
    r.thm3_x = number_or_inf(j.at("thm3_x"));
    r.thm3_agg = number_or_inf(j.at("thm3_agg"));
    r.thm4_x = number_or_inf(j.at("thm4_x"));
    r.thm4_agg = number_or_inf(j.at("thm4_agg"));
    return r;
}

json reduction_to_json(const AuxiliaryGame& aux, const ReductionReport& report) {
    json pops = json::array();
    for (std::size_t n = 0; n < aux.num_populations(); ++n) {
        json p = player_to_json(Player{aux.sets[n], aux.utilities[n]});
        p["size"] = aux.weights[n];
        p["delta_x"] = report.delta_x[n];
        p["delta_u"] = report.delta_u[n];
        pops.push_back(std::move(p));
    }
    return {{"assignment", aux.assignment},
            {"populations", std::move(pops)},
            {"delta_x_max", report.delta_x_max},
            {"delta_u_max", report.delta_u_max},
            {"hausdorff", report.mode == HausdorffMode::exact_box ? "exact_box" : "parametric_surrogate"},
            {"kmeans_objective", report.kmeans_objective},
            {"preference_repairs", aux.preference_repairs},
            {"upper_repairs", aux.upper_repairs},
            {"affine_hull_violations", aux.affine_hull_violations}};
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return json::parse(in);
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_aggregate_csv(const std::filesystem::path& path, std::span<const double> aggregate) {
    auto out = open_out(path);
    out << "t,X_t\n";
    for (std::size_t t = 0; t < aggregate.size(); ++t) out << t + 1 << ',' << aggregate[t] << '\n';
}

void write_compare_csv(const std::filesystem::path& path, const std::vector<CompareRow>& rows) {
    auto out = open_out(path);
    out << "N,rel_err_agg,wall_ms,iterations,K_value,thm4_bound\n";
    auto num = [](double v) { return std::isfinite(v) ? (std::ostringstream() << std::setprecision(17) << v).str() : std::string("inf"); };
    for (const CompareRow& r : rows)
        out << r.populations << ',' << r.rel_err_agg << ',' << r.wall_ms << ',' << r.iterations << ','
            << num(r.K_value) << ',' << num(r.thm4_bound) << '\n';
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace) {
    auto out = open_out(path);
    out << "iter,residual,max_primal_violation,gap_proxy\n";
    for (const TraceRow& r : trace)
        out << r.iter << ',' << r.residual << ',' << r.max_primal_violation << ',' << r.gap_proxy << '\n';
}

std::uint64_t config_hash(const json& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : config.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

RunManifest::RunManifest(std::string command, json config)
    : command_(std::move(command)), config_(std::move(config)), started_(utc_timestamp()) {}

json RunManifest::to_json() const {
    std::ostringstream hash;
    hash << std::hex << std::setw(16) << std::setfill('0') << config_hash(config_);
    json phases = json::array();
    for (const auto& [name, ms] : phases_) phases.push_back({{"phase", name}, {"wall_ms", ms}});
    json iters = json::object();
    for (const auto& [name, n] : iterations_) iters[name] = n;
    return {{"command", command_}, {"config", config_}, {"config_hash", hash.str()}, {"seed", seed_},
            {"started", started_}, {"finished", utc_timestamp()}, {"phases", std::move(phases)},
            {"iterations", std::move(iters)}, {"outputs", outputs_}};
}

void RunManifest::write(const std::filesystem::path& path) {
    add_output(path);
    write_json(path, to_json());
}

}  // namespace congeq::io
