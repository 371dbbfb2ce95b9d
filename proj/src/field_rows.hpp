#pragma once

// Row-level pieces shared by the parallel kernels and their serial
// references. Keeping the per-row arithmetic in one place is what makes the
// two paths agree bit for bit.

#include <cstddef>

#include "holdout/field.hpp"

namespace holdout::detail {

// Allocates all arrays and row offsets; rows 0..n_x-1 are grid columns, then
// the left line and the right line.
AccuracyField allocate_field(double prevalence, const QuadratureSpec& grid);

void fill_row(AccuracyField& field, const DensityModel& pos, const DensityModel& neg, std::size_t row);

void finalize_node(AccuracyField& field, std::size_t i);

DomainSums row_sums(const AccuracyField& field, const HoldoutRule& rule, std::size_t row);

double row_min_kept_z(const AccuracyField& field, const HoldoutRule& rule, double below, std::size_t row);

inline void accumulate(DomainSums& total, const DomainSums& part) {
    total.p_in_pos += part.p_in_pos;
    total.p_in_neg += part.p_in_neg;
    total.n_in_pos += part.n_in_pos;
    total.n_in_neg += part.n_in_neg;
    total.q_held += part.q_held;
}

}  // namespace holdout::detail
