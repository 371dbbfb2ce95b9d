#include "holdout/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace holdout {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double swap_derivative(double z_r, double z_rp, double target_x) {
    const double den = z_rp - target_x;
    if (den == 0.0) throw SingularSwap("swap derivative undefined: partner cell sits exactly at the target accuracy");
    return (z_r - target_x) / den;
}

std::optional<double> set_partial(const AccuracyField& field, const Waterline& wl, std::size_t node) {
    if (node >= field.size()) throw DomainError("set_partial: node index out of range");
    const HoldoutRule rule = wl.rule();
    const double x = wl.target_x;
    std::optional<double> best;
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (!field.supported(i) || !(field.z[i] < x)) continue;
        if (!(rule.kept(field.z[i], field.positive[i] != 0) > 0.0)) continue;
        const double d = swap_derivative(field.z[node], field.z[i], x);
        if (!best || d < *best) best = d;
    }
    return best;
}

GreedyResult greedy_oracle(const AccuracyField& field, double target_x) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < field.size(); ++i)
        if (field.q[i] > 0.0) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return field.z[a] < field.z[b]; });

    double correct = 0.0, mass = 0.0;
    for (std::size_t i : order) {
        correct += std::max(field.pq[i], field.nq[i]);
        mass += field.q[i];
    }
    GreedyResult r;
    std::size_t k = 0;
    while (k < order.size() && correct < target_x * mass) {
        const std::size_t i = order[k++];
        correct -= std::max(field.pq[i], field.nq[i]);
        mass -= field.q[i];
        r.holdout_mass += field.q[i];
    }
    if (k == order.size()) throw InfeasibleTarget("greedy oracle: no hold-out reaches the target accuracy");
    r.cells_removed = k;
    r.z_level = field.z[order[k]];
    return r;
}

Certificate certify(const AccuracyField& field, const Waterline& wl) {
    const HoldoutRule rule = wl.rule();
    const double x = wl.target_x;
    Certificate c;
    c.target_x = x;
    c.eps_grid = 1e-8 + inter_level_gap(field, wl.z0);
    c.log_set_partial.assign(field.size(), std::numeric_limits<double>::quiet_NaN());

    // a / (z - X) is monotone in z below X, so the infimum over classified
    // partners is attained at the lowest or the highest of their levels.
    double zmin = kInf, zmax = -kInf;
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (!field.supported(i) || !(field.z[i] < x)) continue;
        if (!(rule.kept(field.z[i], field.positive[i] != 0) > 0.0)) continue;
        zmin = std::min(zmin, field.z[i]);
        zmax = std::max(zmax, field.z[i]);
    }
    c.vacuous = !std::isfinite(zmin);
    c.min_log_set_partial = kInf;
    if (c.vacuous) {
        c.passed = true;
        return c;
    }
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (!field.supported(i) || !(rule.kept(field.z[i], field.positive[i] != 0) < 1.0)) continue;
        const double partial = std::min(swap_derivative(field.z[i], zmin, x), swap_derivative(field.z[i], zmax, x));
        const double lg = partial > 0.0 ? std::log(partial) : -kInf;
        c.log_set_partial[i] = lg;
        c.min_log_set_partial = std::min(c.min_log_set_partial, lg);
        if (lg < -c.eps_grid) c.violations.push_back({i, lg});
    }
    c.passed = c.violations.empty();
    return c;
}

ClassSwapReport class_swap_check(const AccuracyField& field, const Waterline& wl,
                                 std::span<const std::uint8_t> assigned_positive) {
    if (!assigned_positive.empty() && assigned_positive.size() != field.size())
        throw DomainError("class_swap_check: one class assignment per cell is required");
    const HoldoutRule rule = wl.rule();
    ClassSwapReport report;
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (!field.supported(i)) continue;
        const bool binary = field.positive[i] != 0;
        if (!(rule.kept(field.z[i], binary) > 0.0)) continue;
        const bool assigned = assigned_positive.empty() ? binary : assigned_positive[i] != 0;
        const double own = assigned ? field.pq[i] : field.nq[i];
        const double other = assigned ? field.nq[i] : field.pq[i];
        if (own < other) report.violations.push_back(i);
    }
    return report;
}

}  // namespace holdout
