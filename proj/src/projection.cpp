#include "congeq/projection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace congeq {

namespace {

void clamp_into(std::span<const double> v, const BoxSimplexSet& set, double lambda, std::span<double> out) {
    for (std::size_t t = 0; t < v.size(); ++t) out[t] = std::clamp(v[t] - lambda, set.lower[t], set.upper[t]);
}

}  // namespace

void project_box_simplex(std::span<const double> v, const BoxSimplexSet& set, std::span<double> out,
                         ProjectionWorkspace& ws) {
    const std::size_t T = set.dim();
    if (v.size() != T || out.size() != T) throw std::invalid_argument("projection dimension mismatch");
    ws.ops = 0;
    if (!set.total) {
        clamp_into(v, set, 0.0, out);
        ws.ops = T;
        return;
    }
    const double total = *set.total;

    double lo_sum = 0.0;
    double hi_sum = 0.0;
    auto& events = ws.events;
    events.clear();
    for (std::size_t t = 0; t < T; ++t) {
        lo_sum += set.lower[t];
        hi_sum += set.upper[t];
        if (set.lower[t] < set.upper[t]) {
            events.emplace_back(v[t] - set.upper[t], t << 1);
            events.emplace_back(v[t] - set.lower[t], (t << 1) | 1U);
        }
    }
    ws.ops += T;
    const double slack = kFeasTol * (1.0 + std::abs(total));
    if (total < lo_sum - slack || total > hi_sum + slack)
        throw std::invalid_argument("projection onto an empty set");
    if (total <= lo_sum) {
        std::copy(set.lower.begin(), set.lower.end(), out.begin());
        return;
    }
    if (total >= hi_sum) {
        std::copy(set.upper.begin(), set.upper.end(), out.begin());
        return;
    }

    std::size_t comparisons = 0;
    std::sort(events.begin(), events.end(), [&comparisons](const auto& a, const auto& b) {
        ++comparisons;
        return a.first < b.first || (a.first == b.first && a.second < b.second);
    });
    ws.ops += comparisons;

    // Sweep lambda upward. Below the first event every coordinate sits at its upper bound.
    double mass = hi_sum;
    double at = events.front().first;
    std::size_t free = 0;
    double lambda = at;
    for (const auto& [e, code] : events) {
        ++ws.ops;
        const double next_mass = mass - static_cast<double>(free) * (e - at);
        if (next_mass <= total) {
            lambda = at + (mass - total) / static_cast<double>(free);
            break;
        }
        mass = next_mass;
        at = e;
        lambda = e;
        if (code & 1U)
            --free;
        else
            ++free;
    }

    clamp_into(v, set, lambda, out);

    // One correction pass on the strictly interior coordinates removes the rounding drift
    // of the incremental sweep.
    double sum = 0.0;
    std::size_t inside = 0;
    for (std::size_t t = 0; t < T; ++t) {
        sum += out[t];
        if (out[t] > set.lower[t] && out[t] < set.upper[t]) ++inside;
    }
    const double drift = total - sum;
    if (inside > 0 && drift != 0.0) {
        const double shift = drift / static_cast<double>(inside);
        for (std::size_t t = 0; t < T; ++t)
            if (out[t] > set.lower[t] && out[t] < set.upper[t])
                out[t] = std::clamp(out[t] + shift, set.lower[t], set.upper[t]);
    }
}

Vector project_box_simplex(std::span<const double> v, const BoxSimplexSet& set) {
    ProjectionWorkspace ws;
    Vector out(v.size());
    project_box_simplex(v, set, out, ws);
    return out;
}

void project_nonneg(std::span<double> v) {
    for (double& x : v) x = std::max(x, 0.0);
}

Vector project_nonneg(Vector v) {
    project_nonneg(std::span<double>(v));
    return v;
}

}  // namespace congeq
