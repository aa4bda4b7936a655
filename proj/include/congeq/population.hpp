#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "congeq/game.hpp"
#include "congeq/subgradient.hpp"

namespace congeq {

/// p_i = [w_i, y_i (T), m_i, lower_i (T), upper_i (T)], length 3T + 2.
Vector param_vector(const Player& player);
std::vector<Vector> param_vectors(const GameInstance& game);

struct KMeansOptions {
    std::size_t clusters = 5;
    std::uint64_t seed = 0;
    std::size_t max_iters = 300;
    /// Scale every coordinate to unit variance before clustering.
    bool standardize = false;
    /// 0 = all available threads, 1 = serial.
    int threads = 1;
};

struct KMeansResult {
    std::vector<std::size_t> assignment;
    std::vector<Vector> centroids;
    /// Sum over clusters of squared distances to the centroid, after each Lloyd iteration.
    std::vector<double> objective_trace;
    double objective = 0.0;
    std::size_t iterations = 0;
    std::size_t empty_repairs = 0;
};

/// Lloyd iterations from a seeded k-means++ start. Throws std::invalid_argument if clusters > points.
KMeansResult kmeans_cluster(const std::vector<Vector>& points, const KMeansOptions& options);

/// The N-population auxiliary game: population n stands for the players in members[n].
struct AuxiliaryGame {
    std::vector<std::size_t> assignment;          ///< player -> population
    std::vector<std::vector<std::size_t>> members;  ///< population -> players
    Vector weights;                               ///< I_n = |members[n]|
    std::vector<BoxSimplexSet> sets;
    std::vector<QuadPrefUtility> utilities;
    std::vector<PiecewiseLinearCost> costs;
    std::optional<CouplingConstraints> coupling;
    std::size_t preference_repairs = 0;   ///< centroid preferences projected back into the set
    std::size_t upper_repairs = 0;        ///< centroid upper bounds lifted to restore sum(upper) >= m
    std::size_t affine_hull_violations = 0;  ///< members free on a resource the population is pinned on

    std::size_t num_populations() const { return sets.size(); }
    std::size_t horizon() const { return costs.size(); }
};

/// Population parameters are member means. Throws std::invalid_argument for an invalid partition.
AuxiliaryGame build_aux_game(const GameInstance& game, const std::vector<std::size_t>& assignment);

/// Every player its own population.
AuxiliaryGame identity_reduction(const GameInstance& game);

enum class HausdorffMode { exact_box, parametric_surrogate };

struct ReductionReport {
    Vector delta_x;  ///< per population
    Vector delta_u;  ///< per population
    double delta_x_max = 0.0;
    double delta_u_max = 0.0;
    HausdorffMode mode = HausdorffMode::exact_box;
    double kmeans_objective = 0.0;
};

/// Euclidean Hausdorff distance between two pure boxes.
double hausdorff_boxes(const BoxSimplexSet& a, const BoxSimplexSet& b);

/// max over members of d_H(X_i, X_n): exact when every set involved is a pure box, otherwise
/// max_i ||(m_n, lower_n, upper_n) - (m_i, lower_i, upper_i)||.
double delta_x(const GameInstance& game, const std::vector<std::size_t>& members, const BoxSimplexSet& population_set,
               HausdorffMode* mode_used = nullptr);

/// max over members and over x in the bounding box of X_n of ||2 w_n (x - y_n) - 2 w_i (x - y_i)||.
double delta_u(const GameInstance& game, const std::vector<std::size_t>& members, const BoxSimplexSet& population_set,
               const QuadPrefUtility& population_utility);

ReductionReport reduction_report(const GameInstance& game, const AuxiliaryGame& aux);

/// Number of sampled points where 2 w_n (x - y_n) leaves the coordinatewise hull of the
/// member subgradients (a necessary condition for the convex-hull requirement on u_n).
std::size_t subgradient_hull_failures(const GameInstance& game, const AuxiliaryGame& aux, std::size_t samples,
                                      std::uint64_t seed);

/// Every member of population n receives row n.
ActionProfile psi_expand(const Matrix& population_profile, const AuxiliaryGame& aux);
/// Row n is the mean of the member rows.
Matrix psi_contract(const ActionProfile& profile, const AuxiliaryGame& aux);

/// Element of H' for a population profile; the aggregate is sum_n I_n x_n.
SubgradientSelection h_prime_map(const Matrix& population_profile, const AuxiliaryGame& aux,
                                 SelectionRule rule = SelectionRule::right);

}  // namespace congeq
