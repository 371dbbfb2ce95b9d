#include "holdout/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "field_rows.hpp"

namespace holdout {

namespace detail {

AccuracyField allocate_field(double prevalence, const QuadratureSpec& grid) {
    if (!(prevalence >= 0.0 && prevalence <= 1.0)) throw DomainError("prevalence must lie in [0, 1]");
    if (grid.n_x <= 0 || grid.n_y <= 0) throw DomainError("quadrature grid must have positive node counts");
    AccuracyField f;
    f.prevalence = prevalence;
    f.grid = grid;
    const std::size_t n = grid.total_nodes();
    f.region.resize(n);
    f.x.resize(n);
    f.y.resize(n);
    f.pos_mass.resize(n);
    f.neg_mass.resize(n);
    f.pq.resize(n);
    f.nq.resize(n);
    f.q.resize(n);
    f.z.resize(n);
    f.positive.resize(n);
    const std::size_t rows = static_cast<std::size_t>(grid.n_x) + 2;
    f.row_begin.resize(rows + 1);
    for (std::size_t r = 0; r <= rows; ++r) f.row_begin[r] = r * static_cast<std::size_t>(grid.n_y);
    return f;
}

void fill_row(AccuracyField& f, const DensityModel& pos, const DensityModel& neg, std::size_t row) {
    const QuadratureSpec& g = f.grid;
    const std::size_t begin = f.row_begin[row];
    const std::size_t n = f.row_begin[row + 1] - begin;
    std::span<double> pm(f.pos_mass.data() + begin, n);
    std::span<double> nm(f.neg_mass.data() + begin, n);
    const auto n_x = static_cast<std::size_t>(g.n_x);
    Region region = Region::interior;
    double x = 0.0;
    if (row < n_x) {
        x = g.x_node(static_cast<int>(row));
        pos.column_masses(static_cast<int>(row), pm);
        neg.column_masses(static_cast<int>(row), nm);
    } else {
        const Side side = row == n_x ? Side::left : Side::right;
        region = side == Side::left ? Region::left_boundary : Region::right_boundary;
        x = side == Side::left ? 0.0 : 1.0;
        pos.line_masses(side, pm);
        neg.line_masses(side, nm);
    }
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t i = begin + j;
        f.region[i] = region;
        f.x[i] = x;
        f.y[i] = g.y_node(static_cast<int>(j));
        finalize_node(f, i);
    }
}

void finalize_node(AccuracyField& f, std::size_t i) {
    const double p = f.prevalence;
    f.pq[i] = p * f.pos_mass[i];
    f.nq[i] = (1.0 - p) * f.neg_mass[i];
    f.q[i] = f.pq[i] + f.nq[i];
    if (f.q[i] > 0.0) {
        f.positive[i] = f.pq[i] >= f.nq[i];
        f.z[i] = std::max(f.pq[i], f.nq[i]) / f.q[i];
    } else {
        f.positive[i] = 1;
        f.z[i] = 0.5;
    }
}

DomainSums row_sums(const AccuracyField& f, const HoldoutRule& rule, std::size_t row) {
    DomainSums s;
    for (std::size_t i = f.row_begin[row]; i < f.row_begin[row + 1]; ++i) {
        if (!(f.q[i] > 0.0)) continue;
        const bool pos = f.positive[i] != 0;
        const double w = rule.kept(f.z[i], pos);
        if (pos) {
            s.p_in_pos += w * f.pos_mass[i];
            s.n_in_pos += w * f.neg_mass[i];
        } else {
            s.p_in_neg += w * f.pos_mass[i];
            s.n_in_neg += w * f.neg_mass[i];
        }
        s.q_held += (1.0 - w) * f.q[i];
    }
    return s;
}

double row_min_kept_z(const AccuracyField& f, const HoldoutRule& rule, double below, std::size_t row) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = f.row_begin[row]; i < f.row_begin[row + 1]; ++i) {
        if (!(f.q[i] > 0.0) || !(f.z[i] < below)) continue;
        if (rule.kept(f.z[i], f.positive[i] != 0) > 0.0) m = std::min(m, f.z[i]);
    }
    return m;
}

}  // namespace detail

AccuracyField build_field(const DensityModel& pos, const DensityModel& neg, double prevalence,
                          const QuadratureSpec& grid) {
    const DensityModel p = pos.renormalized(grid);
    const DensityModel n = neg.renormalized(grid);
    AccuracyField f = detail::allocate_field(prevalence, grid);
    const auto rows = static_cast<long>(f.rows());
#pragma omp parallel for schedule(dynamic, 4)
    for (long r = 0; r < rows; ++r) detail::fill_row(f, p, n, static_cast<std::size_t>(r));
    return f;
}

DomainSums sum_domains(const AccuracyField& f, const HoldoutRule& rule) {
    const auto rows = static_cast<long>(f.rows());
    std::vector<DomainSums> parts(f.rows());
#pragma omp parallel for schedule(static)
    for (long r = 0; r < rows; ++r)
        parts[static_cast<std::size_t>(r)] = detail::row_sums(f, rule, static_cast<std::size_t>(r));
    DomainSums total;
    for (const auto& part : parts) detail::accumulate(total, part);
    return total;
}

double min_kept_z(const AccuracyField& f, const HoldoutRule& rule, double below) {
    const auto rows = static_cast<long>(f.rows());
    double m = std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(min : m)
    for (long r = 0; r < rows; ++r)
        m = std::min(m, detail::row_min_kept_z(f, rule, below, static_cast<std::size_t>(r)));
    return m;
}

AccuracyField field_from_masses(double prevalence, std::vector<double> pos_mass, std::vector<double> neg_mass,
                                std::vector<Region> region) {
    if (pos_mass.size() != neg_mass.size()) throw DomainError("field_from_masses: mass vectors differ in length");
    if (!region.empty() && region.size() != pos_mass.size())
        throw DomainError("field_from_masses: region vector has the wrong length");
    if (!(prevalence >= 0.0 && prevalence <= 1.0)) throw DomainError("prevalence must lie in [0, 1]");
    for (std::size_t i = 0; i < pos_mass.size(); ++i)
        if (!(pos_mass[i] >= 0.0) || !(neg_mass[i] >= 0.0)) throw DomainError("field_from_masses: negative mass");

    AccuracyField f;
    f.prevalence = prevalence;
    const std::size_t n = pos_mass.size();
    f.pos_mass = std::move(pos_mass);
    f.neg_mass = std::move(neg_mass);
    f.region = region.empty() ? std::vector<Region>(n, Region::interior) : std::move(region);
    f.x.resize(n);
    f.y.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) f.x[i] = static_cast<double>(i);
    f.row_begin.resize(n + 1);
    for (std::size_t r = 0; r <= n; ++r) f.row_begin[r] = r;
    finalize_field(f);
    return f;
}

void finalize_field(AccuracyField& f) {
    const std::size_t n = f.pos_mass.size();
    f.pq.resize(n);
    f.nq.resize(n);
    f.q.resize(n);
    f.z.resize(n);
    f.positive.resize(n);
    for (std::size_t i = 0; i < n; ++i) detail::finalize_node(f, i);
}

double max_level(const AccuracyField& f) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f.supported(i)) m = std::max(m, f.z[i]);
    return m;
}

double inter_level_gap(const AccuracyField& f, double z) {
    double above = std::numeric_limits<double>::infinity();
    double below = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!f.supported(i)) continue;
        if (f.z[i] >= z)
            above = std::min(above, f.z[i]);
        else
            below = std::max(below, f.z[i]);
    }
    const bool has_above = std::isfinite(above), has_below = std::isfinite(below);
    if (has_above && has_below) return above - below;
    if (has_above) return above - z;
    if (has_below) return z - below;
    return 0.0;
}

}  // namespace holdout
