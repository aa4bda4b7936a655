#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "congeq/game.hpp"

namespace congeq {

/// Scratch space for project_box_simplex. One per thread; contents are meaningless between calls.
struct ProjectionWorkspace {
    /// Breakpoints of the dual scalar: (lambda, coordinate << 1 | leaves_free).
    std::vector<std::pair<double, std::size_t>> events;
    /// Elementary operations (comparisons and event visits) spent by the last call.
    std::size_t ops = 0;
};

/// Euclidean projection of v onto the set, written into out (out may alias v).
///
/// The solution has the form x_t = clamp(v_t - lambda, lower_t, upper_t) where lambda
/// makes sum(x) = total. The breakpoints v_t - upper_t and v_t - lower_t are sorted and
/// swept once, so a call costs O(T log T).
void project_box_simplex(std::span<const double> v, const BoxSimplexSet& set, std::span<double> out,
                         ProjectionWorkspace& ws);

Vector project_box_simplex(std::span<const double> v, const BoxSimplexSet& set);

/// Componentwise max(v, 0), in place.
void project_nonneg(std::span<double> v);
Vector project_nonneg(Vector v);

}  // namespace congeq
