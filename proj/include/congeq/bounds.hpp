#pragma once

#include <limits>
#include <vector>

#include "congeq/game.hpp"

namespace congeq {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Constants of the a-priori error analysis plus the resulting distance bounds.
/// Bounds that cannot be evaluated (a zero modulus, rho undefined, dX >= rho / 2) are +inf.
struct BoundReport {
    double m = 0.0;       ///< upper bound on max_{x in X_i} ||x||, over all players
    double M = 0.0;       ///< I * m
    double C = 0.0;       ///< largest cost subgradient on [0, M]
    double B_c = 0.0;     ///< ||c(X)|| at X_t = M
    Vector B_u;           ///< per player, sup ||2 w_i (x - y_i)|| over the bounding box of X_i
    double B_u_max = 0.0;
    double B_f = 0.0;     ///< B_c + max_i B_u_i
    double alpha = 0.0;   ///< min_i 2 w_i
    double beta = 0.0;    ///< min_t min slope of c_t
    std::size_t players = 0;
    std::size_t horizon = 0;

    double rho = 0.0;
    bool rho_defined = false;
    bool rho_capped = false;  ///< aggregate margin was capped at M (bounds depending on rho are heuristic)

    double delta_x = 0.0;
    double delta_u = 0.0;
    double K_value = kInf;
    bool K_applicable = false;

    double thm1_x = kInf, thm1_agg = kInf;
    double thm2_x = kInf, thm2_agg = kInf;
    double thm3_x = kInf, thm3_agg = kInf;
    double thm4_x = kInf, thm4_agg = kInf;
};

/// Upper bound on max ||x|| over one action set: exact by vertex enumeration when at most
/// `exact_limit` coordinates are free, otherwise the Lagrangian-dual bound over the mass constraint.
double max_norm(const BoxSimplexSet& set, std::size_t exact_limit = 12);

/// Fills m, M, C, B_c, B_u, B_f, alpha, beta.
BoundReport compute_constants(const GameInstance& game);

struct RhoResult {
    double rho = 0.0;
    bool defined = false;
    bool capped = false;
    double eta = 0.0;     ///< min_i of the relative inradius of X_i (lower bound)
    double margin = 0.0;  ///< d(Y, rbd A) at the chosen aggregate, capped at M
    Matrix witness;       ///< z with d(z_i, rbd X_i) >= rho and A sum(z) <= b
    Matrix centers;       ///< per-player max-margin points
    Vector player_eta;
};

struct RhoOptions {
    std::size_t ascent_iters = 2000;
};

/// Distance from x to the relative boundary of the set (lower bound when a bound is redundant).
double distance_to_relative_boundary(std::span<const double> x, const BoxSimplexSet& set);

/// Interior profile and uniform margin. rho = eta * margin / (3M) with the witness
/// z_i = y_i - t (y_i - center_i), t = margin / (3M), where y maximizes the coupling margin.
RhoResult compute_rho(const GameInstance& game, const BoundReport& constants, const RhoOptions& options = {});

struct KBound {
    double value = kInf;
    bool applicable = false;
};

/// K(dX, du) = 2M (3 B_f dX / rho + du); not applicable unless rho > 0 and dX < rho / 2.
KBound k_bound(double delta_x, double delta_u, const BoundReport& report);

/// Fills K and the eight theorem bounds for the given heterogeneity and report.rho.
void theorem_bounds(BoundReport& report, double delta_x, double delta_u);

/// Distance between the equilibrium actions of two populations: (1/sqrt(a_i) + 1/sqrt(a_j)) K^{1/2}.
double pairwise_population_bound(double alpha_i, double alpha_j, double K);

/// compute_constants + compute_rho + theorem_bounds.
BoundReport full_report(const GameInstance& game, double delta_x, double delta_u, const RhoOptions& options = {});

}  // namespace congeq
