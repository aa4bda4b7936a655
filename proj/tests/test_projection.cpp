#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace congeq;

namespace {

/// Reference projection: bisection on the multiplier of the mass constraint.
Vector bisection_projection(const Vector& v, const BoxSimplexSet& set) {
    const std::size_t T = v.size();
    Vector x(T);
    auto fill = [&](double lam) {
        double s = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            x[t] = std::min(std::max(v[t] - lam, set.lower[t]), set.upper[t]);
            s += x[t];
        }
        return s;
    };
    if (!set.total) {
        fill(0.0);
        return x;
    }
    double lo = -1e6, hi = 1e6;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (fill(mid) > *set.total ? lo : hi) = mid;
    }
    fill(0.5 * (lo + hi));
    return x;
}

double dist(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) s += (a[t] - b[t]) * (a[t] - b[t]);
    return std::sqrt(s);
}

Vector random_vector(Rng& rng, std::size_t T, double scale) {
    Vector v(T);
    for (double& x : v) x = rng.uniform(-scale, scale);
    return v;
}

}  // namespace

TEST_CASE("projection examples") {
    const BoxSimplexSet unit = BoxSimplexSet::simplex(1.0, {0, 0}, {1, 1});
    CHECK(project_box_simplex(Vector{0.3, 0.7}, unit) == Vector{0.3, 0.7});
    const Vector half = project_box_simplex(Vector{0.6, 0.6}, unit);
    CHECK(half[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(half[1] == doctest::Approx(0.5).epsilon(1e-15));
    const Vector corner = project_box_simplex(Vector{2.0, 0.0}, unit);
    CHECK(corner == Vector{1.0, 0.0});
    // Grid check of the corner case: no point of the segment is closer.
    double best = 1e9;
    for (int k = 0; k <= 100000; ++k) {
        const double a = k / 100000.0;
        best = std::min(best, dist({a, 1 - a}, {2.0, 0.0}));
    }
    CHECK(dist(corner, {2.0, 0.0}) <= best + 1e-12);

    const BoxSimplexSet pinned = BoxSimplexSet::simplex(1.5, {0.5, 1.0}, {2, 2});
    CHECK(project_box_simplex(Vector{9, -9}, pinned) == Vector{0.5, 1.0});
    CHECK(project_box_simplex(Vector{-1, 5}, BoxSimplexSet::box({0, 0}, {2, 2})) == Vector{0, 2});
}

TEST_CASE("nonnegative projection") {
    CHECK(project_nonneg(Vector{-1, 2}) == Vector{0, 2});
    CHECK(project_nonneg(Vector{1, 2}) == Vector{1, 2});
    CHECK(project_nonneg(Vector{0, 0}) == Vector{0, 0});
}

TEST_CASE("projection matches the bisection oracle") {
    Rng rng(21);
    for (int trial = 0; trial < 500; ++trial) {
        const auto T = static_cast<std::size_t>(rng.uniform_int(1, 30));
        const BoxSimplexSet set = testing::random_set(rng, T, trial % 5 != 0);
        const Vector v = random_vector(rng, T, 5.0);
        const Vector p = project_box_simplex(v, set);
        CHECK(dist(p, bisection_projection(v, set)) <= 1e-8);
        CHECK(set.violation(p) <= 1e-12);
        CHECK(dist(project_box_simplex(p, set), p) <= 1e-12);
    }
}

TEST_CASE("projection is nonexpansive") {
    Rng rng(22);
    for (int trial = 0; trial < 300; ++trial) {
        const auto T = static_cast<std::size_t>(rng.uniform_int(1, 24));
        const BoxSimplexSet set = testing::random_set(rng, T, true);
        const Vector v = random_vector(rng, T, 4.0), w = random_vector(rng, T, 4.0);
        CHECK(dist(project_box_simplex(v, set), project_box_simplex(w, set)) <= dist(v, w) + 1e-12);
    }
}

TEST_CASE("projection with duplicate breakpoints and flat segments") {
    // Equal v and equal bounds produce ties in the breakpoint list.
    const BoxSimplexSet set = BoxSimplexSet::simplex(2.0, {0, 0, 0, 0}, {1, 1, 1, 1});
    const Vector p = project_box_simplex(Vector{3, 3, 3, 3}, set);
    for (double x : p) CHECK(x == doctest::Approx(0.5));
    // Some coordinates pinned (lower == upper).
    const BoxSimplexSet mixed = BoxSimplexSet::simplex(3.0, {1, 0, 0.5}, {1, 2, 0.5});
    const Vector q = project_box_simplex(Vector{0, 0, 0}, mixed);
    CHECK(q == Vector{1, 1.5, 0.5});
}

TEST_CASE("projection operation count is O(T log T)") {
    Rng rng(23);
    ProjectionWorkspace ws;
    for (std::size_t T : {4, 24, 96, 384}) {
        std::size_t worst = 0;
        for (int trial = 0; trial < 50; ++trial) {
            const BoxSimplexSet set = testing::random_set(rng, T, true);
            const Vector v = random_vector(rng, T, 5.0);
            Vector out(T);
            project_box_simplex(v, set, out, ws);
            worst = std::max(worst, ws.ops);
        }
        const double n = 2.0 * static_cast<double>(T);
        CHECK(static_cast<double>(worst) <= 4.0 * n * std::log2(n) + 4.0 * n);
    }
}

TEST_CASE("projected profiles pass the zero-tolerance feasibility check") {
    Rng rng(24);
    for (int trial = 0; trial < 50; ++trial) {
        const GameInstance g = testing::random_game(rng, {4, 5, true, false});
        const ActionProfile x = testing::random_profile(rng, g);
        CHECK(is_feasible(x, g, 0.0).feasible);
    }
}
