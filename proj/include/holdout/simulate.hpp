#pragma once

#include <cstdint>
#include <vector>

#include "holdout/model.hpp"
#include "holdout/types.hpp"

namespace holdout {

struct SimSpec {
    DensityParams pos_params;
    DensityParams neg_params;
    double prevalence = 0.5;
    std::size_t n_samples = 1000;
    std::uint64_t seed = 0;
    double censor_lower = 0.0;  // latent x bounds
    double censor_upper = 1.0;
};

inline constexpr long kMaxRejections = 1000000;

// Seed of the independent stream used for sample `index`.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

// Draws labeled samples: latent Gaussian x censored onto the bounds, y from
// the Gamma with shape k(clamp(x, 0, 1)) truncated to [0, 1] by rejection.
// Deterministic given the spec, regardless of thread count.
std::vector<Sample> sample_population(const SimSpec& spec);

// Inverse of the transform for x_max_bits / y_divisor: working coordinates
// back to raw readouts.
RawReading to_raw(const Sample& s, const ScaleRecord& scale);

// Default parameter pairs used by the CLI and the tutorials.
DensityParams default_positive_params();
DensityParams default_negative_params();

}  // namespace holdout
