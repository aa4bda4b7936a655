#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "congeq/cost.hpp"
#include "congeq/matrix.hpp"

namespace congeq {

/// Default absolute per-coordinate feasibility tolerance.
inline constexpr double kFeasTol = 1e-9;

/// Action set {x : lower <= x <= upper, sum(x) = total}. Without a total it is a pure box.
struct BoxSimplexSet {
    std::optional<double> total;
    Vector lower;
    Vector upper;

    static BoxSimplexSet box(Vector lower, Vector upper) { return {std::nullopt, std::move(lower), std::move(upper)}; }
    static BoxSimplexSet simplex(double total, Vector lower, Vector upper) {
        return {total, std::move(lower), std::move(upper)};
    }

    std::size_t dim() const { return lower.size(); }
    bool has_total() const { return total.has_value(); }

    /// Throws std::invalid_argument if bounds are inconsistent or the set is empty.
    void validate() const;

    /// Largest violation of membership (0 when x is in the set). The mass residual is
    /// counted beyond the rounding bound (T + 1) eps max(sum|x|, total) of the summation.
    double violation(std::span<const double> x) const;
    bool contains(std::span<const double> x, double tol = kFeasTol) const { return violation(x) <= tol; }

    bool operator==(const BoxSimplexSet&) const = default;
};

/// u(x) = -weight * ||x - preference||^2. A zero weight means no utility term.
struct QuadPrefUtility {
    double weight = 0.0;
    Vector preference;

    double value(std::span<const double> x) const;
    /// The (unique) subgradient of -u at x: 2 * weight * (x - preference).
    Vector subgrad(std::span<const double> x) const;
    /// Strong-concavity modulus 2 * weight.
    double modulus() const { return 2.0 * weight; }

    bool operator==(const QuadPrefUtility&) const = default;
};

/// Linear coupling constraints A X <= b on the aggregate profile.
struct CouplingConstraints {
    Matrix matrix;
    Vector rhs;

    std::size_t rows() const { return rhs.size(); }
    /// A X - b.
    Vector slack_violation(std::span<const double> aggregate) const;
    /// A^T lambda.
    Vector transpose_times(std::span<const double> lambda) const;

    bool operator==(const CouplingConstraints&) const = default;
};

struct Player {
    BoxSimplexSet set;
    QuadPrefUtility utility;
    bool operator==(const Player&) const = default;
};

/// Atomic splittable congestion game: players sharing T resources.
class GameInstance {
public:
    GameInstance(std::vector<Player> players, PiecewiseLinearCost cost, std::size_t horizon,
                 std::optional<CouplingConstraints> coupling = std::nullopt);
    /// Per-resource costs.
    GameInstance(std::vector<Player> players, std::vector<PiecewiseLinearCost> costs,
                 std::optional<CouplingConstraints> coupling = std::nullopt);

    std::size_t num_players() const { return players_.size(); }
    std::size_t horizon() const { return costs_.size(); }
    const std::vector<Player>& players() const { return players_; }
    const Player& player(std::size_t i) const { return players_.at(i); }
    const PiecewiseLinearCost& cost(std::size_t t) const { return costs_[t]; }
    const std::vector<PiecewiseLinearCost>& costs() const { return costs_; }
    /// True when every resource shares one cost function.
    bool shared_cost() const;
    const std::optional<CouplingConstraints>& coupling() const { return coupling_; }

    bool operator==(const GameInstance&) const = default;

private:
    void validate() const;

    std::vector<Player> players_;
    std::vector<PiecewiseLinearCost> costs_;
    std::optional<CouplingConstraints> coupling_;
};

using ActionProfile = Matrix;

/// Columnwise sum X_t = sum_i x_{i,t}, accumulated in row order.
Vector aggregate(const ActionProfile& profile);
/// Weighted aggregate X_t = sum_n w_n x_{n,t}.
Vector aggregate(const ActionProfile& profile, std::span<const double> weights);

struct FeasibilityReport {
    bool feasible = true;
    double worst_mass = 0.0;      ///< largest |sum_t x_{i,t} - m_i| beyond summation rounding
    double worst_bound = 0.0;     ///< largest bound violation over all players and resources
    double worst_coupling = 0.0;  ///< largest positive entry of A X - b
    std::size_t worst_coupling_row = 0;
};

FeasibilityReport is_feasible(const ActionProfile& profile, const GameInstance& game, double tol = kFeasTol);

/// f_i(x_i, X) = sum_t x_{i,t} c_t(X_t) + w_i ||x_i - y_i||^2.
double player_cost(std::size_t i, const ActionProfile& profile, const GameInstance& game);

}  // namespace congeq
