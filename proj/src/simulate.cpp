#include "holdout/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <string>

#include "holdout/transform.hpp"

namespace holdout {

namespace {

std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void check(const SimSpec& spec) {
    if (spec.n_samples < 1) throw DomainError("simulate: need at least one sample");
    if (!(spec.prevalence >= 0.0 && spec.prevalence <= 1.0)) throw DomainError("simulate: prevalence must lie in [0, 1]");
    if (!(spec.censor_lower >= 0.0 && spec.censor_lower < spec.censor_upper && spec.censor_upper <= 1.0))
        throw DomainError("simulate: censor bounds must satisfy 0 <= lower < upper <= 1");
    for (const DensityParams* p : {&spec.pos_params, &spec.neg_params}) {
        if (!(p->sigma >= 0.0) || !(p->theta > 0.0) || !std::isfinite(p->mu))
            throw DomainError("simulate: need sigma >= 0 and theta > 0");
        if (!(shape_k(*p, 0.0) > 0.0) || !(shape_k(*p, 1.0) > 0.0)) throw DomainError("simulate: k(x) must be positive");
    }
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    return mix(mix(seed) + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

std::vector<Sample> sample_population(const SimSpec& spec) {
    check(spec);
    std::vector<Sample> out(spec.n_samples);
    std::atomic<bool> exhausted{false};
    const auto n = static_cast<long>(spec.n_samples);

#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        std::mt19937_64 rng(substream_seed(spec.seed, static_cast<std::uint64_t>(i)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const bool positive = unit(rng) < spec.prevalence;
        const DensityParams& p = positive ? spec.pos_params : spec.neg_params;

        double chi = p.mu;
        if (p.sigma > 0.0) chi = std::normal_distribution<double>(p.mu, p.sigma)(rng);
        const auto [x, flag] = censor_x(chi, spec.censor_lower, spec.censor_upper);

        std::gamma_distribution<double> gamma(shape_k(p, std::clamp(chi, 0.0, 1.0)), p.theta);
        double y = gamma(rng);
        long tries = 1;
        while (y > 1.0 && tries < kMaxRejections) {
            y = gamma(rng);
            ++tries;
        }
        if (y > 1.0) exhausted = true;

        auto& s = out[static_cast<std::size_t>(i)];
        s.x = x;
        s.y = y;
        s.x_censor = flag;
        s.label = positive ? Label::positive : Label::negative;
    }
    if (exhausted)
        throw DomainError("simulate: truncated Gamma rejection exceeded " + std::to_string(kMaxRejections) +
                          " tries; theta is too large for the unit interval");
    return out;
}

RawReading to_raw(const Sample& s, const ScaleRecord& scale) {
    auto inverse = [](double bits) { return std::max(std::exp2(bits + 1.0) - 2.0, 0.0); };
    RawReading r;
    r.total_igg = inverse(s.x * scale.x_max_bits);
    r.sars_igg_sum = inverse(s.y * scale.y_divisor);
    r.label = s.label;
    return r;
}

DensityParams default_positive_params() { return {0.6, 0.15, 0.12, 2.0, 6.0, 0.5, 0.4}; }

DensityParams default_negative_params() { return {0.3, 0.15, 0.04, 0.6, 4.0, 0.5, 0.8}; }

}  // namespace holdout
