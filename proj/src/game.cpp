#include "congeq/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace congeq {

void BoxSimplexSet::validate() const {
    if (lower.size() != upper.size()) throw std::invalid_argument("set bounds differ in length");
    double lo_sum = 0.0;
    double hi_sum = 0.0;
    for (std::size_t t = 0; t < lower.size(); ++t) {
        if (!(lower[t] >= 0.0) || !(upper[t] >= lower[t]))
            throw std::invalid_argument("set bounds must satisfy 0 <= lower <= upper");
        lo_sum += lower[t];
        hi_sum += upper[t];
    }
    if (total) {
        const double slack = kFeasTol * (1.0 + std::abs(*total));
        if (*total < lo_sum - slack || *total > hi_sum + slack)
            throw std::invalid_argument("set is empty: total outside [sum(lower), sum(upper)]");
    }
}

namespace {

/// |sum(x) - total| less the worst-case rounding of the recursive sum, floored at 0.
double mass_excess(std::span<const double> x, double total) {
    double sum = 0.0, abs_sum = 0.0;
    for (double v : x) {
        sum += v;
        abs_sum += std::abs(v);
    }
    const double rounding = static_cast<double>(x.size() + 1) * std::numeric_limits<double>::epsilon() *
                            std::max(abs_sum, std::abs(total));
    return std::max(std::abs(sum - total) - rounding, 0.0);
}

}  // namespace

double BoxSimplexSet::violation(std::span<const double> x) const {
    double worst = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) worst = std::max({worst, lower[t] - x[t], x[t] - upper[t]});
    if (total) worst = std::max(worst, mass_excess(x, *total));
    return worst;
}

double QuadPrefUtility::value(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double d = x[t] - preference[t];
        s += d * d;
    }
    return -weight * s;
}

Vector QuadPrefUtility::subgrad(std::span<const double> x) const {
    Vector g(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) g[t] = 2.0 * weight * (x[t] - preference[t]);
    return g;
}

Vector CouplingConstraints::slack_violation(std::span<const double> aggregate) const {
    Vector out(rows());
    for (std::size_t r = 0; r < rows(); ++r) out[r] = dot(matrix.row(r), aggregate) - rhs[r];
    return out;
}

Vector CouplingConstraints::transpose_times(std::span<const double> lambda) const {
    Vector out(matrix.cols(), 0.0);
    for (std::size_t r = 0; r < rows(); ++r) {
        if (lambda[r] == 0.0) continue;
        auto a = matrix.row(r);
        for (std::size_t t = 0; t < out.size(); ++t) out[t] += lambda[r] * a[t];
    }
    return out;
}

GameInstance::GameInstance(std::vector<Player> players, PiecewiseLinearCost cost, std::size_t horizon,
                           std::optional<CouplingConstraints> coupling)
    : players_(std::move(players)), costs_(horizon, cost), coupling_(std::move(coupling)) {
    validate();
}

GameInstance::GameInstance(std::vector<Player> players, std::vector<PiecewiseLinearCost> costs,
                           std::optional<CouplingConstraints> coupling)
    : players_(std::move(players)), costs_(std::move(costs)), coupling_(std::move(coupling)) {
    validate();
}

bool GameInstance::shared_cost() const {
    return std::all_of(costs_.begin(), costs_.end(), [&](const auto& c) { return c == costs_.front(); });
}

void GameInstance::validate() const {
    if (players_.empty()) throw std::invalid_argument("game needs at least one player");
    if (costs_.empty()) throw std::invalid_argument("game needs at least one resource");
    const std::size_t T = costs_.size();
    for (const Player& p : players_) {
        if (p.set.dim() != T) throw std::invalid_argument("player set dimension differs from horizon");
        p.set.validate();
        if (p.utility.weight < 0.0) throw std::invalid_argument("utility weight must be nonnegative");
        if (p.utility.preference.size() != T)
            throw std::invalid_argument("preference dimension differs from horizon");
    }
    if (coupling_) {
        if (coupling_->matrix.cols() != T || coupling_->matrix.rows() != coupling_->rhs.size())
            throw std::invalid_argument("coupling matrix shape mismatch");
    }
}

Vector aggregate(const ActionProfile& profile) {
    Vector X(profile.cols(), 0.0);
    for (std::size_t i = 0; i < profile.rows(); ++i) {
        auto r = profile.row(i);
        for (std::size_t t = 0; t < X.size(); ++t) X[t] += r[t];
    }
    return X;
}

Vector aggregate(const ActionProfile& profile, std::span<const double> weights) {
    if (weights.size() != profile.rows()) throw std::invalid_argument("weights/profile size mismatch");
    Vector X(profile.cols(), 0.0);
    for (std::size_t i = 0; i < profile.rows(); ++i) {
        auto r = profile.row(i);
        for (std::size_t t = 0; t < X.size(); ++t) X[t] += weights[i] * r[t];
    }
    return X;
}

FeasibilityReport is_feasible(const ActionProfile& profile, const GameInstance& game, double tol) {
    if (profile.rows() != game.num_players() || profile.cols() != game.horizon())
        throw std::invalid_argument("profile dimensions do not match game");
    FeasibilityReport rep;
    for (std::size_t i = 0; i < profile.rows(); ++i) {
        const BoxSimplexSet& s = game.player(i).set;
        auto x = profile.row(i);
        for (std::size_t t = 0; t < x.size(); ++t)
            rep.worst_bound = std::max({rep.worst_bound, s.lower[t] - x[t], x[t] - s.upper[t]});
        if (s.total) rep.worst_mass = std::max(rep.worst_mass, mass_excess(x, *s.total));
    }
    if (game.coupling()) {
        const Vector v = game.coupling()->slack_violation(aggregate(profile));
        for (std::size_t r = 0; r < v.size(); ++r) {
            if (v[r] > rep.worst_coupling) {
                rep.worst_coupling = v[r];
                rep.worst_coupling_row = r;
            }
        }
    }
    rep.feasible = rep.worst_bound <= tol && rep.worst_mass <= tol && rep.worst_coupling <= tol;
    return rep;
}

double player_cost(std::size_t i, const ActionProfile& profile, const GameInstance& game) {
    if (i >= game.num_players()) throw std::out_of_range("player index out of range");
    const Vector X = aggregate(profile);
    auto x = profile.row(i);
    double network = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) network += x[t] * game.cost(t)(X[t]);
    return network - game.player(i).utility.value(x);
}

}  // namespace congeq
