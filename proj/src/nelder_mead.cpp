#include "holdout/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace holdout {

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          std::vector<double> start, const SimplexOptions& options) {
    const std::size_t n = start.size();
    SimplexResult result;
    if (n == 0) {
        result.x = start;
        result.value = objective(start);
        result.evaluations = 1;
        result.converged = true;
        return result;
    }

    auto eval = [&](const std::vector<double>& v) {
        ++result.evaluations;
        const double f = objective(v);
        return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
    };

    std::vector<std::vector<double>> pts(n + 1, start);
    std::vector<double> f(n + 1);
    for (std::size_t i = 0; i < n; ++i)
        pts[i + 1][i] += options.initial_step * std::max(std::abs(start[i]), 0.5);
    for (std::size_t i = 0; i <= n; ++i) f[i] = eval(pts[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);

    auto point_at = [&](double t, std::vector<double>& out, const std::vector<double>& worst) {
        for (std::size_t k = 0; k < n; ++k) out[k] = centroid[k] + t * (worst[k] - centroid[k]);
    };

    while (true) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

        double diameter = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                diameter = std::max(diameter, std::abs(pts[i][k] - pts[best][k]));
        const double spread = f[worst] - f[best];
        if (std::isfinite(f[best]) && spread <= options.f_tolerance * (1.0 + std::abs(f[best])) &&
            diameter <= options.x_tolerance) {
            result.converged = true;
            break;
        }
        if (result.evaluations >= options.max_evaluations) break;
        ++result.iterations;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i)
            if (i != worst)
                for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k];
        for (double& c : centroid) c /= static_cast<double>(n);

        point_at(-1.0, trial, pts[worst]);
        const double fr = eval(trial);
        if (fr < f[best]) {
            point_at(-2.0, trial2, pts[worst]);
            const double fe = eval(trial2);
            if (fe < fr) {
                pts[worst] = trial2;
                f[worst] = fe;
            } else {
                pts[worst] = trial;
                f[worst] = fr;
            }
            continue;
        }
        if (fr < f[second]) {
            pts[worst] = trial;
            f[worst] = fr;
            continue;
        }
        // Outside contraction when the reflection improved on the worst
        // vertex, inside otherwise.
        const bool outside = fr < f[worst];
        point_at(outside ? -0.5 : 0.5, trial2, pts[worst]);
        const double fc = eval(trial2);
        if (fc < (outside ? fr : f[worst])) {
            pts[worst] = trial2;
            f[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t k = 0; k < n; ++k) pts[i][k] = pts[best][k] + 0.5 * (pts[i][k] - pts[best][k]);
            f[i] = eval(pts[i]);
        }
    }

    const auto it = std::min_element(f.begin(), f.end());
    result.x = pts[static_cast<std::size_t>(it - f.begin())];
    result.value = *it;
    return result;
}

}  // namespace holdout
