#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "holdout/model.hpp"
#include "holdout/quadrature.hpp"
#include "holdout/types.hpp"

namespace holdout {

// Both class-conditional densities integrated over the quadrature cells,
// together with the local accuracy Z* and binary class of every cell.
// Storage is struct-of-arrays; nodes are grouped in rows (one grid column
// or one boundary line each) so reductions can run row-parallel and still
// sum in a fixed order.
struct AccuracyField {
    double prevalence = 0.5;
    QuadratureSpec grid{0, 0};

    std::vector<Region> region;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> pos_mass;  // P mass of the cell
    std::vector<double> neg_mass;  // N mass of the cell
    std::vector<double> pq;        // p * pos_mass
    std::vector<double> nq;        // (1 - p) * neg_mass
    std::vector<double> q;         // pq + nq
    std::vector<double> z;         // max(pq, nq) / q, 1/2 where q == 0
    std::vector<std::uint8_t> positive;
    std::vector<std::size_t> row_begin;  // rows() + 1 offsets

    std::size_t size() const { return z.size(); }
    std::size_t rows() const { return row_begin.empty() ? 0 : row_begin.size() - 1; }
    bool supported(std::size_t i) const { return q[i] > 0.0; }
};

// Which cells are classified: a cell of binary class c is kept when
// Z* >= threshold(c). Cells in [band_low, band_high) whose threshold equals
// band_high are kept with weight band_keep (the partially held-out level set).
struct HoldoutRule {
    double z_pos = 0.5;
    double z_neg = 0.5;
    double band_low = 2.0;
    double band_high = 2.0;
    double band_keep = 0.0;

    static HoldoutRule uniform(double zeta) { return {zeta, zeta, 2.0, 2.0, 0.0}; }

    double kept(double z, bool is_positive) const {
        const double t = is_positive ? z_pos : z_neg;
        if (z >= t) return 1.0;
        if (t == band_high && z >= band_low) return band_keep;
        return 0.0;
    }
};

// Kept masses split by binary domain. P/N masses are unweighted by prevalence.
struct DomainSums {
    double p_in_pos = 0.0;  // true-positive P mass
    double p_in_neg = 0.0;  // false-negative P mass
    double n_in_pos = 0.0;  // false-positive N mass
    double n_in_neg = 0.0;  // true-negative N mass
    double q_held = 0.0;    // held-out Q mass

    double mass_p() const { return p_in_pos + p_in_neg; }
    double mass_n() const { return n_in_pos + n_in_neg; }
    double mass_q(double p) const { return p * mass_p() + (1.0 - p) * mass_n(); }
    double correct(double p) const { return p * p_in_pos + (1.0 - p) * n_in_neg; }
    double errors(double p) const { return (1.0 - p) * n_in_pos + p * p_in_neg; }

    bool operator==(const DomainSums&) const = default;
};

// Parallel kernels (OpenMP over rows).
AccuracyField build_field(const DensityModel& pos, const DensityModel& neg, double prevalence,
                          const QuadratureSpec& grid);
DomainSums sum_domains(const AccuracyField& field, const HoldoutRule& rule);
// Smallest Z* over cells with non-zero kept weight and Z* < below; +inf if none.
double min_kept_z(const AccuracyField& field, const HoldoutRule& rule, double below);

// Serial reference implementations with identical summation order; the
// parallel kernels must reproduce them bit for bit.
namespace reference {
AccuracyField build_field(const DensityModel& pos, const DensityModel& neg, double prevalence,
                          const QuadratureSpec& grid);
DomainSums sum_domains(const AccuracyField& field, const HoldoutRule& rule);
double min_kept_z(const AccuracyField& field, const HoldoutRule& rule, double below);
}  // namespace reference

// Field from explicit cell masses (one row per cell). Used for toy grids.
AccuracyField field_from_masses(double prevalence, std::vector<double> pos_mass, std::vector<double> neg_mass,
                                std::vector<Region> region = {});

// Fills pq, nq, q, z and positive from the masses.
void finalize_field(AccuracyField& field);

// Largest Z* among supported cells.
double max_level(const AccuracyField& field);
// Width of the gap between Z* levels that contains z: the nearest supported
// level >= z minus the nearest level < z (one-sided when only one exists).
double inter_level_gap(const AccuracyField& field, double z);

}  // namespace holdout
