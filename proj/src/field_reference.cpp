#include <algorithm>
#include <limits>

#include "field_rows.hpp"
#include "holdout/field.hpp"

namespace holdout::reference {

AccuracyField build_field(const DensityModel& pos, const DensityModel& neg, double prevalence,
                          const QuadratureSpec& grid) {
    const DensityModel p = pos.renormalized(grid);
    const DensityModel n = neg.renormalized(grid);
    AccuracyField f = detail::allocate_field(prevalence, grid);
    for (std::size_t r = 0; r < f.rows(); ++r) detail::fill_row(f, p, n, r);
    return f;
}

DomainSums sum_domains(const AccuracyField& f, const HoldoutRule& rule) {
    DomainSums total;
    for (std::size_t r = 0; r < f.rows(); ++r) detail::accumulate(total, detail::row_sums(f, rule, r));
    return total;
}

double min_kept_z(const AccuracyField& f, const HoldoutRule& rule, double below) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < f.rows(); ++r) m = std::min(m, detail::row_min_kept_z(f, rule, below, r));
    return m;
}

}  // namespace holdout::reference
