#pragma once

#include <vector>

namespace congeq {

/// Closed interval [lo, hi]; a subdifferential of a scalar convex function.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const Interval&) const = default;
};

/// Which element of a non-singleton subdifferential the solver uses.
enum class SelectionRule { right, left, midpoint };

double select(const Interval& interval, SelectionRule rule);

/// Continuous, convex, nondecreasing piecewise-affine per-unit resource cost on [0, inf).
///
/// Stored as pieces (threshold, slope, value): on [threshold_j, threshold_{j+1}] the
/// cost is value_j + slope_j * (X - threshold_j). The first threshold is 0. Keeping
/// the value at each threshold (rather than the intercept) makes evaluation exact at
/// every breakpoint.
class PiecewiseLinearCost {
public:
    struct Piece {
        double threshold = 0.0;
        double slope = 0.0;
        double value = 0.0;
        bool operator==(const Piece&) const = default;
    };

    /// Breakpoints closer than this to X count as "at" the breakpoint.
    static constexpr double kBreakpointTol = 1e-12;

    PiecewiseLinearCost() : PiecewiseLinearCost(std::vector<Piece>{{0.0, 0.0, 0.0}}) {}

    /// Throws std::invalid_argument unless the pieces describe a continuous, convex,
    /// nondecreasing function starting at threshold 0.
    explicit PiecewiseLinearCost(std::vector<Piece> pieces);

    /// From affine pieces c(X) = intercepts[j] + slopes[j] * X on [breakpoints[j-1], breakpoints[j]].
    static PiecewiseLinearCost from_affine(const std::vector<double>& breakpoints,
                                           const std::vector<double>& intercepts,
                                           const std::vector<double>& slopes);
    static PiecewiseLinearCost affine(double intercept, double slope);
    static PiecewiseLinearCost constant(double value) { return affine(value, 0.0); }

    /// Throws std::domain_error for X < 0.
    double operator()(double X) const;
    double eval(double X) const { return (*this)(X); }

    /// Subdifferential at X: the piece slope in a piece interior, [slope_{j-1}, slope_j]
    /// at an interior breakpoint.
    Interval subdiff(double X) const;

    /// Smallest slope (the strict-increase modulus).
    double min_slope() const { return pieces_.front().slope; }
    /// Largest subgradient over [0, upper].
    double max_slope(double upper) const { return subdiff(upper).hi; }

    /// Antiderivative int_0^X c(s) ds; convex since c is nondecreasing.
    double integral(double X) const;

    const std::vector<Piece>& pieces() const { return pieces_; }
    bool operator==(const PiecewiseLinearCost&) const = default;

private:
    std::size_t piece_index(double X) const;
    std::vector<Piece> pieces_;
};

}  // namespace congeq
