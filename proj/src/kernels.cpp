#include "congeq/kernels.hpp"

#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "congeq/projection.hpp"
#include "congeq/solver.hpp"

namespace congeq::kernels {

int resolve_threads(int requested) {
#ifdef _OPENMP
    return requested > 0 ? requested : omp_get_max_threads();
#else
    (void)requested;
    return 1;
#endif
}

namespace {

inline void descent_row(const EquilibriumProblem& problem, const Matrix& x, const PriceState& prices,
                        std::span<const double> dual_price, double tau, Matrix& next, std::size_t n,
                        Vector& scratch, ProjectionWorkspace& ws) {
    auto xn = x.row(n);
    player_subgradient(xn, problem.utilities[n], prices, problem.mode, scratch);
    for (std::size_t t = 0; t < scratch.size(); ++t) scratch[t] = xn[t] - tau * (scratch[t] + dual_price[t]);
    project_box_simplex(scratch, problem.sets[n], next.row(n), ws);
}

inline double sq_dist(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

inline std::pair<std::size_t, double> nearest(const Vector& p, const std::vector<Vector>& centers) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = sq_dist(p, centers[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return {best, best_d};
}

}  // namespace

void descent_step_serial(const EquilibriumProblem& problem, const Matrix& x, const PriceState& prices,
                         std::span<const double> dual_price, double tau, Matrix& next) {
    Vector scratch(x.cols());
    ProjectionWorkspace ws;
    for (std::size_t n = 0; n < x.rows(); ++n) descent_row(problem, x, prices, dual_price, tau, next, n, scratch, ws);
}

void descent_step_parallel(const EquilibriumProblem& problem, const Matrix& x, const PriceState& prices,
                           std::span<const double> dual_price, double tau, Matrix& next, int threads) {
    const auto rows = static_cast<std::ptrdiff_t>(x.rows());
#pragma omp parallel num_threads(resolve_threads(threads))
    {
        Vector scratch(x.cols());
        ProjectionWorkspace ws;
#pragma omp for schedule(static)
        for (std::ptrdiff_t n = 0; n < rows; ++n)
            descent_row(problem, x, prices, dual_price, tau, next, static_cast<std::size_t>(n), scratch, ws);
    }
}

double assign_nearest_serial(const std::vector<Vector>& points, const std::vector<Vector>& centers,
                             std::vector<std::size_t>& assignment) {
    assignment.resize(points.size());
    double objective = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto [c, d] = nearest(points[i], centers);
        assignment[i] = c;
        objective += d;
    }
    return objective;
}

double assign_nearest_parallel(const std::vector<Vector>& points, const std::vector<Vector>& centers,
                               std::vector<std::size_t>& assignment, int threads) {
    assignment.resize(points.size());
    Vector dist(points.size());
    const auto count = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto [c, d] = nearest(points[static_cast<std::size_t>(i)], centers);
        assignment[static_cast<std::size_t>(i)] = c;
        dist[static_cast<std::size_t>(i)] = d;
    }
    // Serial sum keeps the objective independent of the thread count.
    double objective = 0.0;
    for (double d : dist) objective += d;
    return objective;
}

}  // namespace congeq::kernels
