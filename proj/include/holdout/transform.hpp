#pragma once

#include <span>
#include <utility>
#include <vector>

#include "holdout/types.hpp"

namespace holdout {

// Divisors mapping log-transformed readouts onto [0, 1]. Learned once on
// training data and persisted with the model so test data shares the scale.
struct ScaleRecord {
    double x_max_bits = 1.0;  // largest log-transformed total IgG in training
    double y_divisor = 7.0;   // fixed: seven antigen channels

    bool operator==(const ScaleRecord&) const = default;
};

struct NormalizedX {
    std::vector<double> values;
    ScaleRecord scale;
};

struct TransformStats {
    std::size_t x_lower_censored = 0;
    std::size_t x_upper_censored = 0;
    std::size_t y_clamped = 0;
};

// log2(d + 2) - 1, i.e. the readout in bits. Throws DomainError for d < 0.
double log_transform(double d);

// Divides every value by the maximum and records that maximum.
NormalizedX normalize_total_igg(std::span<const double> bits);

// bits / 7, clamped to 1 (the assay is not expected to saturate in y).
double normalize_sars(double bits);

// Clamps x into [lower, upper]. A value at or beyond a bound is reported as
// censored at that bound, so the bound value itself always carries the flag.
std::pair<double, Censor> censor_x(double x, double lower, double upper);

ScaleRecord learn_scale(std::span<const RawReading> readings);

// Applies the full transform with a fixed scale; x is censored onto [0, 1].
std::vector<Sample> to_samples(std::span<const RawReading> readings, const ScaleRecord& scale,
                               TransformStats* stats = nullptr);

}  // namespace holdout
