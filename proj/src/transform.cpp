#include "holdout/transform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "holdout/error.hpp"

namespace holdout {

std::string_view to_string(Label l) { return l == Label::positive ? "pos" : "neg"; }

std::string_view to_string(Klass k) {
    switch (k) {
        case Klass::positive: return "pos";
        case Klass::negative: return "neg";
        default: return "indeterminate";
    }
}

std::string_view to_string(Region r) {
    switch (r) {
        case Region::left_boundary: return "left";
        case Region::right_boundary: return "right";
        default: return "interior";
    }
}

std::string_view to_string(Censor c) {
    switch (c) {
        case Censor::at_lower_bound: return "at_lower_bound";
        case Censor::at_upper_bound: return "at_upper_bound";
        default: return "interior";
    }
}

std::optional<Label> parse_label(std::string_view s) {
    if (s == "pos") return Label::positive;
    if (s == "neg") return Label::negative;
    if (s == "unknown" || s.empty()) return std::nullopt;
    throw DataError("unknown label '" + std::string(s) + "' (expected pos, neg or unknown)");
}

Klass parse_klass(std::string_view s) {
    if (s == "pos") return Klass::positive;
    if (s == "neg") return Klass::negative;
    if (s == "indeterminate") return Klass::indeterminate;
    throw DataError("unknown class '" + std::string(s) + "'");
}

Region parse_region(std::string_view s) {
    if (s == "interior") return Region::interior;
    if (s == "left") return Region::left_boundary;
    if (s == "right") return Region::right_boundary;
    throw DataError("unknown region '" + std::string(s) + "'");
}

double log_transform(double d) {
    if (!(d >= 0.0)) throw DomainError("log_transform: readout must be nonnegative");
    return std::log2(d + 2.0) - 1.0;
}

NormalizedX normalize_total_igg(std::span<const double> bits) {
    if (bits.empty()) throw DomainError("normalize_total_igg: empty input");
    const double max = *std::max_element(bits.begin(), bits.end());
    if (!(max > 0.0)) throw DomainError("normalize_total_igg: maximum must be positive");
    NormalizedX out;
    out.scale.x_max_bits = max;
    out.values.reserve(bits.size());
    for (double b : bits) out.values.push_back(b / max);
    return out;
}

double normalize_sars(double bits) {
    if (!(bits >= 0.0)) throw DomainError("normalize_sars: value must be nonnegative");
    return std::min(bits / 7.0, 1.0);
}

std::pair<double, Censor> censor_x(double x, double lower, double upper) {
    if (!(lower < upper)) throw DomainError("censor_x: lower bound must be below upper bound");
    if (x <= lower) return {lower, Censor::at_lower_bound};
    if (x >= upper) return {upper, Censor::at_upper_bound};
    return {x, Censor::interior};
}

ScaleRecord learn_scale(std::span<const RawReading> readings) {
    std::vector<double> bits;
    bits.reserve(readings.size());
    for (const auto& r : readings) bits.push_back(log_transform(r.total_igg));
    return normalize_total_igg(bits).scale;
}

std::vector<Sample> to_samples(std::span<const RawReading> readings, const ScaleRecord& scale,
                               TransformStats* stats) {
    if (!(scale.x_max_bits > 0.0) || !(scale.y_divisor > 0.0))
        throw DomainError("to_samples: scale divisors must be positive");
    TransformStats local;
    std::vector<Sample> out;
    out.reserve(readings.size());
    for (const auto& r : readings) {
        const auto [x, flag] = censor_x(log_transform(r.total_igg) / scale.x_max_bits, 0.0, 1.0);
        const double ybits = log_transform(r.sars_igg_sum) / scale.y_divisor;
        if (ybits > 1.0) ++local.y_clamped;
        if (flag == Censor::at_lower_bound) ++local.x_lower_censored;
        if (flag == Censor::at_upper_bound) ++local.x_upper_censored;
        out.push_back({x, std::min(ybits, 1.0), flag, r.label});
    }
    if (stats) *stats = local;
    return out;
}

}  // namespace holdout
