#include "congeq/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "congeq/projection.hpp"

namespace congeq {

namespace {

std::vector<std::size_t> free_coordinates(const BoxSimplexSet& set) {
    std::vector<std::size_t> free;
    for (std::size_t t = 0; t < set.dim(); ++t)
        if (set.lower[t] < set.upper[t]) free.push_back(t);
    return free;
}

/// Max of ||x||^2 over vertices: every free coordinate at a bound except at most one.
double max_sq_norm_enumerated(const BoxSimplexSet& set, const std::vector<std::size_t>& free) {
    const std::size_t k = free.size();
    double fixed_sq = 0.0;
    double target = *set.total;
    for (std::size_t t = 0; t < set.dim(); ++t)
        if (!(set.lower[t] < set.upper[t])) {
            fixed_sq += set.lower[t] * set.lower[t];
            target -= set.lower[t];
        }
    double best = -1.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        double sum = 0.0;
        double sq = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t t = free[j];
            const double v = (mask >> j) & 1U ? set.upper[t] : set.lower[t];
            sum += v;
            sq += v * v;
        }
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t t = free[j];
            const double v = (mask >> j) & 1U ? set.upper[t] : set.lower[t];
            const double xf = target - (sum - v);
            const double tol = 1e-12 * (1.0 + std::abs(target));
            if (xf < set.lower[t] - tol || xf > set.upper[t] + tol) continue;
            const double c = std::clamp(xf, set.lower[t], set.upper[t]);
            best = std::max(best, sq - v * v + c * c);
        }
    }
    return fixed_sq + std::max(best, 0.0);
}

/// min over mu of mu m + sum_t max(l^2 - mu l, u^2 - mu u): weak duality on the mass constraint.
double max_sq_norm_dual(const BoxSimplexSet& set) {
    const double m = *set.total;
    auto g = [&](double mu) {
        double v = mu * m;
        for (std::size_t t = 0; t < set.dim(); ++t) {
            const double l = set.lower[t];
            const double u = set.upper[t];
            v += std::max(l * l - mu * l, u * u - mu * u);
        }
        return v;
    };
    double best = 0.0;
    for (double u : set.upper) best += u * u;
    for (std::size_t t = 0; t < set.dim(); ++t) best = std::min(best, g(set.lower[t] + set.upper[t]));
    return best;
}

double unit_direction_norm(std::size_t free_count) {
    return std::sqrt(1.0 - 1.0 / static_cast<double>(free_count));
}

}  // namespace

double max_norm(const BoxSimplexSet& set, std::size_t exact_limit) {
    if (!set.total) {
        double s = 0.0;
        for (std::size_t t = 0; t < set.dim(); ++t) s += std::max(set.lower[t] * set.lower[t], set.upper[t] * set.upper[t]);
        return std::sqrt(s);
    }
    const auto free = free_coordinates(set);
    if (free.size() <= exact_limit) return std::sqrt(max_sq_norm_enumerated(set, free));
    return std::sqrt(max_sq_norm_dual(set));
}

BoundReport compute_constants(const GameInstance& game) {
    BoundReport r;
    r.players = game.num_players();
    r.horizon = game.horizon();
    const std::size_t T = game.horizon();
    r.alpha = kInf;
    for (const Player& p : game.players()) {
        r.m = std::max(r.m, max_norm(p.set));
        r.alpha = std::min(r.alpha, p.utility.modulus());
        double sq = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            const double lo = 2.0 * p.utility.weight * (p.set.lower[t] - p.utility.preference[t]);
            const double hi = 2.0 * p.utility.weight * (p.set.upper[t] - p.utility.preference[t]);
            sq += std::max(lo * lo, hi * hi);
        }
        r.B_u.push_back(std::sqrt(sq));
        r.B_u_max = std::max(r.B_u_max, r.B_u.back());
    }
    r.M = static_cast<double>(r.players) * r.m;
    r.beta = kInf;
    double bc = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        const PiecewiseLinearCost& c = game.cost(t);
        r.C = std::max(r.C, c.max_slope(r.M));
        r.beta = std::min(r.beta, c.min_slope());
        const double v = c(r.M);
        bc += v * v;
    }
    r.B_c = std::sqrt(bc);
    r.B_f = r.B_c + r.B_u_max;
    return r;
}

double distance_to_relative_boundary(std::span<const double> x, const BoxSimplexSet& set) {
    const auto free = free_coordinates(set);
    const std::size_t needed = set.total ? 2 : 1;
    if (free.size() < needed) return 0.0;
    double d = kInf;
    for (std::size_t t : free) d = std::min({d, x[t] - set.lower[t], set.upper[t] - x[t]});
    return set.total ? d / unit_direction_norm(free.size()) : d;
}

namespace {

/// Relative inradius (w.r.t. the coordinate facets) and a point attaining it.
double player_inradius(const BoxSimplexSet& set, std::span<double> center) {
    const auto free = free_coordinates(set);
    std::copy(set.lower.begin(), set.lower.end(), center.begin());
    if (!set.total) {
        if (free.empty()) return 0.0;
        double eta = kInf;
        for (std::size_t t : free) {
            eta = std::min(eta, 0.5 * (set.upper[t] - set.lower[t]));
            center[t] = 0.5 * (set.lower[t] + set.upper[t]);
        }
        return eta;
    }
    if (free.size() < 2) {
        // Pinned set: the single feasible point.
        const Vector p = project_box_simplex(set.lower, set);
        std::copy(p.begin(), p.end(), center.begin());
        return 0.0;
    }
    const double k = static_cast<double>(free.size());
    const double s = unit_direction_norm(free.size());
    double target = *set.total;
    double lo_sum = 0.0, hi_sum = 0.0, width = kInf;
    for (std::size_t t = 0; t < set.dim(); ++t) {
        if (!(set.lower[t] < set.upper[t])) {
            target -= set.lower[t];
            continue;
        }
        lo_sum += set.lower[t];
        hi_sum += set.upper[t];
        width = std::min(width, set.upper[t] - set.lower[t]);
    }
    const double eta = std::max(0.0, std::min({width / (2.0 * s), (target - lo_sum) / (k * s), (hi_sum - target) / (k * s)}));
    double shrunk_lo = 0.0, shrunk_hi = 0.0;
    for (std::size_t t : free) {
        shrunk_lo += set.lower[t] + eta * s;
        shrunk_hi += set.upper[t] - eta * s;
    }
    const double theta = shrunk_hi > shrunk_lo ? std::clamp((target - shrunk_lo) / (shrunk_hi - shrunk_lo), 0.0, 1.0) : 0.0;
    for (std::size_t t : free) {
        const double a = set.lower[t] + eta * s;
        const double b = set.upper[t] - eta * s;
        center[t] = a + theta * (b - a);
    }
    return eta;
}

double coupling_margin(const CouplingConstraints& cc, const Vector& row_norms, std::span<const double> Y,
                       std::size_t* active = nullptr) {
    double best = kInf;
    for (std::size_t r = 0; r < cc.rows(); ++r) {
        if (row_norms[r] == 0.0) continue;
        const double v = (cc.rhs[r] - dot(cc.matrix.row(r), Y)) / row_norms[r];
        if (v < best) {
            best = v;
            if (active) *active = r;
        }
    }
    return best;
}

}  // namespace

RhoResult compute_rho(const GameInstance& game, const BoundReport& constants, const RhoOptions& options) {
    const std::size_t I = game.num_players();
    const std::size_t T = game.horizon();
    RhoResult res;
    res.centers = Matrix(I, T);
    res.eta = kInf;
    for (std::size_t i = 0; i < I; ++i) {
        const double eta = player_inradius(game.player(i).set, res.centers.row(i));
        res.player_eta.push_back(eta);
        res.eta = std::min(res.eta, eta);
    }

    const double M = constants.M;
    Matrix best_profile = res.centers;
    double margin = kInf;
    if (game.coupling()) {
        const CouplingConstraints& cc = *game.coupling();
        Vector row_norms(cc.rows());
        for (std::size_t r = 0; r < cc.rows(); ++r) row_norms[r] = std::sqrt(norm2(cc.matrix.row(r)));

        Matrix prefs(I, T);
        for (std::size_t i = 0; i < I; ++i) {
            const Vector p = project_box_simplex(game.player(i).utility.preference, game.player(i).set);
            std::copy(p.begin(), p.end(), prefs.row(i).begin());
        }
        margin = coupling_margin(cc, row_norms, aggregate(best_profile));
        if (const double mp = coupling_margin(cc, row_norms, aggregate(prefs)); mp > margin) {
            margin = mp;
            best_profile = prefs;
        }

        // Projected supergradient ascent on the concave margin over the product of action sets.
        Matrix x = best_profile;
        ProjectionWorkspace ws;
        Vector v(T);
        const double scale = std::max(constants.m, 1e-12);
        for (std::size_t k = 1; k <= options.ascent_iters; ++k) {
            std::size_t active = 0;
            coupling_margin(cc, row_norms, aggregate(x), &active);
            const double step = scale / std::sqrt(static_cast<double>(k)) / static_cast<double>(I);
            auto a = cc.matrix.row(active);
            for (std::size_t i = 0; i < I; ++i) {
                auto xi = x.row(i);
                for (std::size_t t = 0; t < T; ++t) v[t] = xi[t] - step * a[t] / row_norms[active];
                project_box_simplex(v, game.player(i).set, xi, ws);
            }
            const double mk = coupling_margin(cc, row_norms, aggregate(x));
            if (mk > margin) {
                margin = mk;
                best_profile = x;
            }
        }
    }

    res.capped = !(margin <= M);
    res.margin = std::min(margin, M);
    res.witness = best_profile;
    if (!(res.margin > 0.0) || !(M > 0.0) || !(res.eta > 0.0)) {
        res.rho = 0.0;
        res.defined = false;
        return res;
    }
    const double t = res.margin / (3.0 * M);
    for (std::size_t i = 0; i < I; ++i)
        for (std::size_t s = 0; s < T; ++s)
            res.witness(i, s) = best_profile(i, s) - t * (best_profile(i, s) - res.centers(i, s));
    res.rho = res.eta * t;
    res.defined = true;
    return res;
}

KBound k_bound(double delta_x, double delta_u, const BoundReport& report) {
    if (!(report.rho > 0.0) || !(delta_x < report.rho / 2.0)) return {kInf, false};
    return {2.0 * report.M * (3.0 * report.B_f * delta_x / report.rho + delta_u), true};
}

void theorem_bounds(BoundReport& r, double delta_x, double delta_u) {
    const double I = static_cast<double>(r.players);
    const double T = static_cast<double>(r.horizon);
    auto root = [](double num, double modulus) { return modulus > 0.0 ? std::sqrt(num / modulus) : kInf; };
    r.delta_x = delta_x;
    r.delta_u = delta_u;
    r.thm1_x = 2.0 * r.M * root(T * r.C, r.alpha * I);
    r.thm1_agg = 2.0 * r.M * root(T * r.C, r.beta * I);
    r.thm2_x = r.M * root(2.0 * T * r.C, r.alpha * I);
    r.thm2_agg = r.M * root(2.0 * T * r.C, r.beta * I);
    const KBound K = k_bound(delta_x, delta_u, r);
    r.K_value = K.value;
    r.K_applicable = K.applicable;
    r.thm3_x = K.applicable ? root(K.value, r.alpha) : kInf;
    r.thm3_agg = K.applicable ? root(K.value, r.beta) : kInf;
    r.thm4_x = r.thm3_x + r.thm2_x;
    r.thm4_agg = r.thm3_agg + r.thm2_agg;
}

double pairwise_population_bound(double alpha_i, double alpha_j, double K) {
    if (!(alpha_i > 0.0) || !(alpha_j > 0.0)) return kInf;
    return (1.0 / std::sqrt(alpha_i) + 1.0 / std::sqrt(alpha_j)) * std::sqrt(K);
}

BoundReport full_report(const GameInstance& game, double delta_x, double delta_u, const RhoOptions& options) {
    BoundReport r = compute_constants(game);
    const RhoResult rho = compute_rho(game, r, options);
    r.rho = rho.rho;
    r.rho_defined = rho.defined;
    r.rho_capped = rho.capped;
    theorem_bounds(r, delta_x, delta_u);
    return r;
}

}  // namespace congeq
