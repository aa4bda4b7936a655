#include "congeq/cost.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace congeq {

double select(const Interval& interval, SelectionRule rule) {
    switch (rule) {
        case SelectionRule::right: return interval.hi;
        case SelectionRule::left: return interval.lo;
        case SelectionRule::midpoint: return 0.5 * (interval.lo + interval.hi);
    }
    return interval.hi;
}

PiecewiseLinearCost::PiecewiseLinearCost(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw std::invalid_argument("cost needs at least one piece");
    if (pieces_.front().threshold != 0.0)
        throw std::invalid_argument("first cost threshold must be 0");
    if (pieces_.front().slope < 0.0) throw std::invalid_argument("cost must be nondecreasing");
    for (std::size_t j = 1; j < pieces_.size(); ++j) {
        const Piece& prev = pieces_[j - 1];
        const Piece& cur = pieces_[j];
        if (!(cur.threshold > prev.threshold))
            throw std::invalid_argument("cost thresholds must be strictly increasing");
        if (!(cur.slope > prev.slope))
            throw std::invalid_argument("cost slopes must be strictly increasing (convexity)");
        const double reached = prev.value + prev.slope * (cur.threshold - prev.threshold);
        if (std::abs(reached - cur.value) > 1e-12 * (1.0 + std::abs(cur.value)))
            throw std::invalid_argument("cost is discontinuous at threshold " +
                                        std::to_string(cur.threshold));
    }
}

PiecewiseLinearCost PiecewiseLinearCost::from_affine(const std::vector<double>& breakpoints,
                                                     const std::vector<double>& intercepts,
                                                     const std::vector<double>& slopes) {
    if (intercepts.size() != slopes.size() || breakpoints.size() + 1 != slopes.size())
        throw std::invalid_argument("affine cost: need one more piece than breakpoints");
    std::vector<Piece> pieces;
    pieces.push_back({0.0, slopes[0], intercepts[0]});
    for (std::size_t j = 0; j < breakpoints.size(); ++j) {
        const double k = breakpoints[j];
        const double left = intercepts[j] + slopes[j] * k;
        const double right = intercepts[j + 1] + slopes[j + 1] * k;
        if (std::abs(left - right) > 1e-12 * (1.0 + std::abs(left)))
            throw std::invalid_argument("affine cost is discontinuous at " + std::to_string(k));
        pieces.push_back({k, slopes[j + 1], right});
    }
    return PiecewiseLinearCost(std::move(pieces));
}

PiecewiseLinearCost PiecewiseLinearCost::affine(double intercept, double slope) {
    return PiecewiseLinearCost(std::vector<Piece>{{0.0, slope, intercept}});
}

std::size_t PiecewiseLinearCost::piece_index(double X) const {
    // Last piece whose threshold is <= X (thresholds within tolerance count as reached).
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), X,
                               [](double x, const Piece& p) { return x + kBreakpointTol < p.threshold; });
    return static_cast<std::size_t>(it - pieces_.begin()) - 1;
}

double PiecewiseLinearCost::operator()(double X) const {
    if (X < 0.0) throw std::domain_error("cost evaluated at negative demand");
    const Piece& p = pieces_[piece_index(X)];
    if (X == p.threshold) return p.value;
    return p.value + p.slope * (X - p.threshold);
}

Interval PiecewiseLinearCost::subdiff(double X) const {
    if (X < 0.0) throw std::domain_error("subdifferential at negative demand");
    const std::size_t j = piece_index(X);
    const Piece& p = pieces_[j];
    if (j > 0 && std::abs(X - p.threshold) <= kBreakpointTol) return {pieces_[j - 1].slope, p.slope};
    return {p.slope, p.slope};
}

double PiecewiseLinearCost::integral(double X) const {
    if (X < 0.0) throw std::domain_error("cost integral at negative demand");
    double acc = 0.0;
    for (std::size_t j = 0; j < pieces_.size(); ++j) {
        const Piece& p = pieces_[j];
        if (X <= p.threshold) break;
        const double end = j + 1 < pieces_.size() ? std::min(X, pieces_[j + 1].threshold) : X;
        const double len = end - p.threshold;
        acc += p.value * len + 0.5 * p.slope * len * len;
    }
    return acc;
}

}  // namespace congeq
