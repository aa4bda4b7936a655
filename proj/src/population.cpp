#include "congeq/population.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "congeq/kernels.hpp"
#include "congeq/projection.hpp"
#include "congeq/rng.hpp"

namespace congeq {

Vector param_vector(const Player& player) {
    const std::size_t T = player.set.dim();
    Vector p;
    p.reserve(3 * T + 2);
    p.push_back(player.utility.weight);
    p.insert(p.end(), player.utility.preference.begin(), player.utility.preference.end());
    p.push_back(player.set.total.value_or(0.0));
    p.insert(p.end(), player.set.lower.begin(), player.set.lower.end());
    p.insert(p.end(), player.set.upper.begin(), player.set.upper.end());
    return p;
}

std::vector<Vector> param_vectors(const GameInstance& game) {
    std::vector<Vector> out;
    out.reserve(game.num_players());
    for (const Player& p : game.players()) out.push_back(param_vector(p));
    return out;
}

// ---------------------------------------------------------------------------
// k-means
// ---------------------------------------------------------------------------

namespace {

double sq_dist(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

std::vector<Vector> cluster_means(const std::vector<Vector>& points, const std::vector<std::size_t>& assignment,
                                  std::size_t k, std::vector<std::size_t>& counts) {
    const std::size_t dim = points.front().size();
    std::vector<Vector> means(k, Vector(dim, 0.0));
    // Offsets from the first member of each cluster: identical points give an exact mean.
    std::vector<const Vector*> ref(k, nullptr);
    counts.assign(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::size_t c = assignment[i];
        if (!ref[c]) ref[c] = &points[i];
        ++counts[c];
        for (std::size_t j = 0; j < dim; ++j) means[c][j] += points[i][j] - (*ref[c])[j];
    }
    for (std::size_t c = 0; c < k; ++c)
        if (counts[c] > 0)
            for (std::size_t j = 0; j < dim; ++j) means[c][j] = (*ref[c])[j] + means[c][j] / static_cast<double>(counts[c]);
    return means;
}

double sse(const std::vector<Vector>& points, const std::vector<std::size_t>& assignment,
           const std::vector<Vector>& centers) {
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) s += sq_dist(points[i], centers[assignment[i]]);
    return s;
}

std::vector<Vector> kmeans_plus_plus(const std::vector<Vector>& points, std::size_t k, Rng& rng) {
    const std::size_t n = points.size();
    std::vector<Vector> centers;
    std::vector<char> chosen(n, 0);
    std::size_t first = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
    centers.push_back(points[first]);
    chosen[first] = 1;
    Vector d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(points[i], centers.back());
    while (centers.size() < k) {
        double total = 0.0;
        for (double d : d2) total += d;
        std::size_t pick = n;
        if (total > 0.0) {
            const double r = rng.unit() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (d2[i] > 0.0 && r < acc) {
                    pick = i;
                    break;
                }
            }
            if (pick == n)  // r landed on the rounding tail
                for (std::size_t i = n; i-- > 0;)
                    if (d2[i] > 0.0) {
                        pick = i;
                        break;
                    }
        } else {
            // Every point coincides with a center: take the first unused index.
            for (std::size_t i = 0; i < n; ++i)
                if (!chosen[i]) {
                    pick = i;
                    break;
                }
        }
        centers.push_back(points[pick]);
        chosen[pick] = 1;
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(points[i], centers.back()));
    }
    return centers;
}

/// Moves the point farthest from its centroid, within the highest-SSE cluster, into each empty cluster.
std::size_t repair_empty(const std::vector<Vector>& points, std::vector<std::size_t>& assignment,
                         std::vector<Vector>& centers, std::vector<std::size_t>& counts) {
    std::size_t repairs = 0;
    const std::size_t k = centers.size();
    for (std::size_t empty = 0; empty < k; ++empty) {
        if (counts[empty] > 0) continue;
        Vector cluster_sse(k, 0.0);
        for (std::size_t i = 0; i < points.size(); ++i)
            cluster_sse[assignment[i]] += sq_dist(points[i], centers[assignment[i]]);
        std::size_t worst = 0;
        for (std::size_t c = 1; c < k; ++c)
            if (counts[c] > 1 && (counts[worst] <= 1 || cluster_sse[c] > cluster_sse[worst])) worst = c;
        if (counts[worst] <= 1) break;  // nothing left to split
        std::size_t far = points.size();
        double far_d = -1.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (assignment[i] != worst) continue;
            const double d = sq_dist(points[i], centers[worst]);
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        assignment[far] = empty;
        centers = cluster_means(points, assignment, k, counts);
        ++repairs;
    }
    return repairs;
}

}  // namespace

KMeansResult kmeans_cluster(const std::vector<Vector>& input, const KMeansOptions& options) {
    const std::size_t n = input.size();
    const std::size_t k = options.clusters;
    if (n == 0) throw std::invalid_argument("k-means needs at least one point");
    if (k < 1 || k > n) throw std::invalid_argument("k-means needs 1 <= clusters <= points");
    if (options.max_iters < 1) throw std::invalid_argument("k-means needs max_iters >= 1");
    const std::size_t dim = input.front().size();
    for (const Vector& p : input)
        if (p.size() != dim) throw std::invalid_argument("k-means points differ in dimension");

    std::vector<Vector> points = input;
    if (options.standardize) {
        for (std::size_t j = 0; j < dim; ++j) {
            double mean = 0.0;
            for (const Vector& p : points) mean += p[j];
            mean /= static_cast<double>(n);
            double var = 0.0;
            for (const Vector& p : points) var += (p[j] - mean) * (p[j] - mean);
            const double sd = std::sqrt(var / static_cast<double>(n));
            const double scale = sd > 0.0 ? 1.0 / sd : 1.0;
            for (Vector& p : points) p[j] = (p[j] - mean) * scale;
        }
    }

    KMeansResult res;
    if (k == n) {
        res.assignment.resize(n);
        std::iota(res.assignment.begin(), res.assignment.end(), 0);
        res.centroids = input;
        res.objective_trace.push_back(0.0);
        return res;
    }

    auto assign = [&](const std::vector<Vector>& centers, std::vector<std::size_t>& assignment) {
        return options.threads == 1 ? kernels::assign_nearest_serial(points, centers, assignment)
                                    : kernels::assign_nearest_parallel(points, centers, assignment, options.threads);
    };

    Rng rng(options.seed);
    std::vector<Vector> centers = kmeans_plus_plus(points, k, rng);
    std::vector<std::size_t> assignment;
    assign(centers, assignment);
    std::vector<std::size_t> counts;
    for (std::size_t it = 0; it < options.max_iters; ++it) {
        centers = cluster_means(points, assignment, k, counts);
        res.empty_repairs += repair_empty(points, assignment, centers, counts);
        res.objective_trace.push_back(sse(points, assignment, centers));
        ++res.iterations;
        std::vector<std::size_t> next;
        assign(centers, next);
        if (next == assignment) break;
        assignment = std::move(next);
    }
    res.assignment = std::move(assignment);
    res.objective = res.objective_trace.back();
    res.centroids = cluster_means(input, res.assignment, k, counts);
    return res;
}

// ---------------------------------------------------------------------------
// Auxiliary game
// ---------------------------------------------------------------------------

AuxiliaryGame build_aux_game(const GameInstance& game, const std::vector<std::size_t>& assignment) {
    const std::size_t I = game.num_players();
    const std::size_t T = game.horizon();
    if (assignment.size() != I) throw std::invalid_argument("partition does not cover every player");
    const std::size_t N = *std::max_element(assignment.begin(), assignment.end()) + 1;
    AuxiliaryGame aux;
    aux.assignment = assignment;
    aux.members.assign(N, {});
    for (std::size_t i = 0; i < I; ++i) aux.members[assignment[i]].push_back(i);
    for (const auto& m : aux.members)
        if (m.empty()) throw std::invalid_argument("partition has an empty population");
    aux.costs = game.costs();
    aux.coupling = game.coupling();

    for (std::size_t n = 0; n < N; ++n) {
        const auto& members = aux.members[n];
        const double count = static_cast<double>(members.size());
        const bool with_total = game.player(members.front()).set.has_total();
        // Means are accumulated as offsets from the first member, so identical members
        // reproduce their parameters exactly.
        const Player& ref = game.player(members.front());
        double weight = 0.0;
        double total = 0.0;
        Vector pref(T, 0.0), lower(T, 0.0), upper(T, 0.0);
        for (std::size_t i : members) {
            const Player& p = game.player(i);
            if (p.set.has_total() != with_total)
                throw std::invalid_argument("population mixes box and box-simplex players");
            weight += p.utility.weight - ref.utility.weight;
            total += p.set.total.value_or(0.0) - ref.set.total.value_or(0.0);
            for (std::size_t t = 0; t < T; ++t) {
                pref[t] += p.utility.preference[t] - ref.utility.preference[t];
                lower[t] += p.set.lower[t] - ref.set.lower[t];
                upper[t] += p.set.upper[t] - ref.set.upper[t];
            }
        }
        weight = ref.utility.weight + weight / count;
        total = ref.set.total.value_or(0.0) + total / count;
        for (std::size_t t = 0; t < T; ++t) {
            pref[t] = ref.utility.preference[t] + pref[t] / count;
            lower[t] = ref.set.lower[t] + lower[t] / count;
            upper[t] = ref.set.upper[t] + upper[t] / count;
        }
        BoxSimplexSet set = with_total ? BoxSimplexSet::simplex(total, lower, upper) : BoxSimplexSet::box(lower, upper);
        if (with_total) {
            const double hi = std::accumulate(upper.begin(), upper.end(), 0.0);
            if (hi < total) {
                const double lift = (total - hi) / static_cast<double>(T);
                for (double& u : set.upper) u += lift;
                ++aux.upper_repairs;
            }
        }
        if (!set.contains(pref)) {
            pref = project_box_simplex(pref, set);
            ++aux.preference_repairs;
        }
        for (std::size_t i : members) {
            const BoxSimplexSet& s = game.player(i).set;
            for (std::size_t t = 0; t < T; ++t)
                if (s.lower[t] < s.upper[t] && !(set.lower[t] < set.upper[t])) {
                    ++aux.affine_hull_violations;
                    break;
                }
        }
        aux.weights.push_back(count);
        aux.sets.push_back(std::move(set));
        aux.utilities.push_back({weight, std::move(pref)});
    }
    return aux;
}

AuxiliaryGame identity_reduction(const GameInstance& game) {
    std::vector<std::size_t> assignment(game.num_players());
    std::iota(assignment.begin(), assignment.end(), 0);
    return build_aux_game(game, assignment);
}

// ---------------------------------------------------------------------------
// Heterogeneity metrics
// ---------------------------------------------------------------------------

namespace {

/// sup over x in A of dist(x, B) for boxes: separable per coordinate.
double directed_box_distance(const BoxSimplexSet& a, const BoxSimplexSet& b) {
    double s = 0.0;
    for (std::size_t t = 0; t < a.dim(); ++t) {
        const double d = std::max({0.0, b.lower[t] - a.lower[t], a.upper[t] - b.upper[t]});
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

double hausdorff_boxes(const BoxSimplexSet& a, const BoxSimplexSet& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("hausdorff: dimension mismatch");
    return std::max(directed_box_distance(a, b), directed_box_distance(b, a));
}

double delta_x(const GameInstance& game, const std::vector<std::size_t>& members, const BoxSimplexSet& population_set,
               HausdorffMode* mode_used) {
    if (members.empty()) throw std::invalid_argument("delta_x: empty cluster");
    const bool all_boxes = !population_set.has_total() &&
                           std::all_of(members.begin(), members.end(),
                                       [&](std::size_t i) { return !game.player(i).set.has_total(); });
    if (mode_used) *mode_used = all_boxes ? HausdorffMode::exact_box : HausdorffMode::parametric_surrogate;
    double worst = 0.0;
    for (std::size_t i : members) {
        const BoxSimplexSet& s = game.player(i).set;
        double d;
        if (all_boxes) {
            d = hausdorff_boxes(s, population_set);
        } else {
            const double dm = population_set.total.value_or(0.0) - s.total.value_or(0.0);
            double sq = dm * dm;
            for (std::size_t t = 0; t < s.dim(); ++t) {
                const double dl = population_set.lower[t] - s.lower[t];
                const double du = population_set.upper[t] - s.upper[t];
                sq += dl * dl + du * du;
            }
            d = std::sqrt(sq);
        }
        worst = std::max(worst, d);
    }
    return worst;
}

double delta_u(const GameInstance& game, const std::vector<std::size_t>& members, const BoxSimplexSet& population_set,
               const QuadPrefUtility& population_utility) {
    if (members.empty()) throw std::invalid_argument("delta_u: empty cluster");
    const double wn = population_utility.weight;
    double worst = 0.0;
    for (std::size_t i : members) {
        const QuadPrefUtility& u = game.player(i).utility;
        double sq = 0.0;
        for (std::size_t t = 0; t < population_set.dim(); ++t) {
            // |2 (w_n - w_i) x - 2 w_n y_n + 2 w_i y_i| is convex in x: max at an endpoint.
            auto at = [&](double x) {
                return 2.0 * (wn - u.weight) * x - 2.0 * wn * population_utility.preference[t] +
                       2.0 * u.weight * u.preference[t];
            };
            const double lo = at(population_set.lower[t]);
            const double hi = at(population_set.upper[t]);
            sq += std::max(lo * lo, hi * hi);
        }
        worst = std::max(worst, std::sqrt(sq));
    }
    return worst;
}

ReductionReport reduction_report(const GameInstance& game, const AuxiliaryGame& aux) {
    ReductionReport rep;
    bool any_surrogate = false;
    for (std::size_t n = 0; n < aux.num_populations(); ++n) {
        HausdorffMode mode{};
        const double dx = delta_x(game, aux.members[n], aux.sets[n], &mode);
        any_surrogate = any_surrogate || mode == HausdorffMode::parametric_surrogate;
        const double du = delta_u(game, aux.members[n], aux.sets[n], aux.utilities[n]);
        rep.delta_x.push_back(dx);
        rep.delta_u.push_back(du);
        rep.delta_x_max = std::max(rep.delta_x_max, dx);
        rep.delta_u_max = std::max(rep.delta_u_max, du);
    }
    rep.mode = any_surrogate ? HausdorffMode::parametric_surrogate : HausdorffMode::exact_box;
    return rep;
}

std::size_t subgradient_hull_failures(const GameInstance& game, const AuxiliaryGame& aux, std::size_t samples,
                                      std::uint64_t seed) {
    const std::size_t T = aux.horizon();
    std::size_t failures = 0;
    Vector x(T);
    for (std::size_t n = 0; n < aux.num_populations(); ++n) {
        Rng rng(seed, n);
        const BoxSimplexSet& set = aux.sets[n];
        for (std::size_t s = 0; s < samples; ++s) {
            for (std::size_t t = 0; t < T; ++t) x[t] = rng.uniform(set.lower[t], set.upper[t]);
            const Vector gn = aux.utilities[n].subgrad(x);
            Vector lo(T, std::numeric_limits<double>::infinity());
            Vector hi(T, -std::numeric_limits<double>::infinity());
            for (std::size_t i : aux.members[n]) {
                const Vector gi = game.player(i).utility.subgrad(x);
                for (std::size_t t = 0; t < T; ++t) {
                    lo[t] = std::min(lo[t], gi[t]);
                    hi[t] = std::max(hi[t], gi[t]);
                }
            }
            for (std::size_t t = 0; t < T; ++t)
                if (gn[t] < lo[t] - 1e-9 || gn[t] > hi[t] + 1e-9) {
                    ++failures;
                    break;
                }
        }
    }
    return failures;
}

// ---------------------------------------------------------------------------
// Profile maps
// ---------------------------------------------------------------------------

ActionProfile psi_expand(const Matrix& population_profile, const AuxiliaryGame& aux) {
    if (population_profile.rows() != aux.num_populations())
        throw std::invalid_argument("psi_expand: profile rows differ from population count");
    ActionProfile out(aux.assignment.size(), population_profile.cols());
    for (std::size_t i = 0; i < aux.assignment.size(); ++i) {
        auto src = population_profile.row(aux.assignment[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

Matrix psi_contract(const ActionProfile& profile, const AuxiliaryGame& aux) {
    if (profile.rows() != aux.assignment.size())
        throw std::invalid_argument("psi_contract: profile rows differ from player count");
    Matrix out(aux.num_populations(), profile.cols());
    for (std::size_t n = 0; n < aux.num_populations(); ++n) {
        auto dst = out.row(n);
        auto ref = profile.row(aux.members[n].front());
        for (std::size_t i : aux.members[n]) {
            auto src = profile.row(i);
            for (std::size_t t = 0; t < dst.size(); ++t) dst[t] += src[t] - ref[t];
        }
        const double count = static_cast<double>(aux.members[n].size());
        for (std::size_t t = 0; t < dst.size(); ++t) dst[t] = ref[t] + dst[t] / count;
    }
    return out;
}

SubgradientSelection h_prime_map(const Matrix& population_profile, const AuxiliaryGame& aux, SelectionRule rule) {
    const PriceState prices = price_state(aux.costs, aggregate(population_profile, aux.weights), rule);
    SubgradientSelection sel{Matrix(population_profile.rows(), population_profile.cols()), Mode::nonatomic};
    for (std::size_t n = 0; n < population_profile.rows(); ++n)
        player_subgradient(population_profile.row(n), aux.utilities[n], prices, Mode::nonatomic, sel.g.row(n));
    return sel;
}

}  // namespace congeq
