#pragma once

// Data-parallel inner loops. Each kernel has a serial reference version that the
// OpenMP version must reproduce bit for bit (rows are independent; reductions stay serial).

#include <span>
#include <vector>

#include "congeq/matrix.hpp"
#include "congeq/subgradient.hpp"

namespace congeq {
struct EquilibriumProblem;
}

namespace congeq::kernels {

/// next.row(n) = Proj_{X_n}(x.row(n) - tau (g_n + dual_price)) for every row.
void descent_step_serial(const EquilibriumProblem& problem, const Matrix& x, const PriceState& prices,
                         std::span<const double> dual_price, double tau, Matrix& next);
void descent_step_parallel(const EquilibriumProblem& problem, const Matrix& x, const PriceState& prices,
                           std::span<const double> dual_price, double tau, Matrix& next, int threads);

/// assignment[i] = index of the nearest center (lowest index on ties); returns the objective.
double assign_nearest_serial(const std::vector<Vector>& points, const std::vector<Vector>& centers,
                             std::vector<std::size_t>& assignment);
double assign_nearest_parallel(const std::vector<Vector>& points, const std::vector<Vector>& centers,
                               std::vector<std::size_t>& assignment, int threads);

int resolve_threads(int requested);

}  // namespace congeq::kernels
