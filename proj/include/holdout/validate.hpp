#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "holdout/classify.hpp"
#include "holdout/field.hpp"

namespace holdout {

// Rate of probability exchange when swapping r (held out) with r'
// (classified) under the accuracy constraint: (Z_r - X) / (Z_rp - X).
// Throws SingularSwap when Z_rp == X.
double swap_derivative(double z_r, double z_rp, double target_x);

// Infimum of the swap derivative of held-out cell `node` over classified
// cells with Z* < X. Empty optional when no such cell exists (vacuously
// optimal).
std::optional<double> set_partial(const AccuracyField& field, const Waterline& waterline, std::size_t node);

struct GreedyResult {
    double holdout_mass = 0.0;
    double z_level = 0.5;  // Z* of the lowest cell still classified
    std::size_t cells_removed = 0;
};

// Independent bathtub oracle: removes cells in ascending Z* until the
// Q-weighted mean Z* of the remainder reaches target_x. Throws
// InfeasibleTarget when even the top level falls short.
GreedyResult greedy_oracle(const AccuracyField& field, double target_x);

struct CertificateNode {
    std::size_t node = 0;
    double log_set_partial = 0.0;
};

struct Certificate {
    double target_x = 0.0;
    double eps_grid = 0.0;  // 1e-8 + one inter-level gap at z0
    double min_log_set_partial = 0.0;
    bool vacuous = false;
    bool passed = false;
    std::vector<double> log_set_partial;  // per field cell; NaN for classified cells
    std::vector<CertificateNode> violations;
};

// Point-swap certificate over every held-out cell of the grid.
Certificate certify(const AccuracyField& field, const Waterline& waterline);

struct ClassSwapReport {
    std::vector<std::size_t> violations;  // classified cells whose assigned class is the minority
    bool passed() const { return violations.empty(); }
};

// Every classified cell must satisfy Z >= 1/2 for its assigned class, with
// equality only on ties. `assigned_positive` overrides the binary class of
// each cell (same length as the field) when given.
ClassSwapReport class_swap_check(const AccuracyField& field, const Waterline& waterline,
                                 std::span<const std::uint8_t> assigned_positive = {});

}  // namespace holdout
