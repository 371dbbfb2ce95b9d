#include "holdout/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "holdout/nelder_mead.hpp"
#include "holdout/simulate.hpp"

namespace holdout {

namespace {

using Policy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;

constexpr double kYFloor = 1e-9;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr double kInf = std::numeric_limits<double>::infinity();

double log_gauss(double x, double mu, double sigma) {
    const double u = (x - mu) / sigma;
    return -0.5 * u * u - std::log(sigma) - kLogSqrt2Pi;
}

// P(chi < bound) and P(chi > bound) for chi ~ N(mu, sigma^2).
double below(double bound, double mu, double sigma) {
    return 0.5 * boost::math::erfc((mu - bound) / (sigma * std::sqrt(2.0)), Policy());
}
double above(double bound, double mu, double sigma) {
    return 0.5 * boost::math::erfc((bound - mu) / (sigma * std::sqrt(2.0)), Policy());
}

double log_gamma_pdf(double y, double k, double log_theta, double theta, double lgamma_k) {
    return (k - 1.0) * std::log(y) - y / theta - lgamma_k - k * log_theta;
}

double lgamma(double k) { return boost::math::lgamma(k, Policy()); }

// Gamma(k, theta) mass below 1, i.e. the y-truncation factor.
double gamma_mass_unit(double k, double theta) { return boost::math::gamma_p(k, 1.0 / theta, Policy()); }

bool valid(const DensityParams& p) {
    const double vals[] = {p.mu, p.sigma, p.theta, p.alpha1, p.alpha2, p.alpha3, p.alpha4};
    for (double v : vals)
        if (!std::isfinite(v)) return false;
    if (!(p.sigma > 0.0) || !(p.theta > 0.0)) return false;
    return shape_k(p, 0.0) > 0.0 && shape_k(p, 1.0) > 0.0;
}

// Gamma(k, theta) mass of every cell between consecutive edges. Each edge is
// evaluated once, through the lower or upper regularized function depending
// on which side of the mode it lies, so narrow cells in the tail keep their
// relative precision.
void gamma_cells(double k, double theta, const QuadratureSpec& grid, double weight, std::span<double> out) {
    const int n = grid.n_y;
    double prev_value = 0.0;
    bool prev_upper = false;
    for (int j = 0; j <= n; ++j) {
        const double t = grid.y_edge(j) / theta;
        const bool upper = t >= k;
        const double value = upper ? boost::math::gamma_q(k, t, Policy()) : boost::math::gamma_p(k, t, Policy());
        if (j > 0) {
            double cell;
            if (!prev_upper && !upper)
                cell = value - prev_value;
            else if (prev_upper && upper)
                cell = prev_value - value;
            else
                cell = (1.0 - value) - prev_value;
            out[j - 1] = weight * std::max(cell, 0.0);
        }
        prev_value = value;
        prev_upper = upper;
    }
}

}  // namespace

double shape_k(const DensityParams& p, double x) {
    return p.alpha1 * p.alpha1 * (std::tanh(p.alpha2 * (x - p.alpha3)) + 1.0) + p.alpha4 * p.alpha4;
}

double unnormalized_mass(const DensityParams& p, const QuadratureSpec& grid) {
    double interior = 0.0;
    const double hx = grid.hx();
    for (int i = 0; i < grid.n_x; ++i) {
        const double x = grid.x_node(i);
        interior += std::exp(log_gauss(x, p.mu, p.sigma)) * hx * gamma_mass_unit(shape_k(p, x), p.theta);
    }
    const double left = below(0.0, p.mu, p.sigma) * gamma_mass_unit(shape_k(p, 0.0), p.theta);
    const double right = above(1.0, p.mu, p.sigma) * gamma_mass_unit(shape_k(p, 1.0), p.theta);
    return interior + left + right;
}

DensityModel DensityModel::from_params(const DensityParams& params, const QuadratureSpec& grid, ScaleRecord scale) {
    if (!valid(params)) throw DomainError("density parameters invalid: need sigma > 0, theta > 0 and k(x) > 0");
    if (grid.n_x <= 0 || grid.n_y <= 0) throw DomainError("quadrature grid must have positive node counts");
    DensityModel m;
    m.params_ = params;
    m.grid_ = grid;
    m.scale_ = scale;
    m.mass_left_ = below(0.0, params.mu, params.sigma);
    m.mass_right_ = above(1.0, params.mu, params.sigma);
    const double mass = unnormalized_mass(params, grid);
    if (!(mass > 0.0) || !std::isfinite(mass)) throw DomainError("density has no mass on the unit square");
    m.y_renorm_ = 1.0 / mass;
    return m;
}

DensityModel DensityModel::renormalized(const QuadratureSpec& grid) const {
    if (grid == grid_) return *this;
    DensityModel m = from_params(params_, grid, scale_);
    m.diagnostics_ = diagnostics_;
    return m;
}

double DensityModel::interior(double x, double y) const {
    const double k = shape_k(params_, x);
    const double yc = std::max(y, kYFloor);
    return y_renorm_ *
           std::exp(log_gauss(x, params_.mu, params_.sigma) +
                    log_gamma_pdf(yc, k, std::log(params_.theta), params_.theta, lgamma(k)));
}

double DensityModel::boundary(Side side, double y) const {
    const double k = shape_k(params_, side == Side::left ? 0.0 : 1.0);
    const double mass = side == Side::left ? mass_left_ : mass_right_;
    const double yc = std::max(y, kYFloor);
    return y_renorm_ * mass * std::exp(log_gamma_pdf(yc, k, std::log(params_.theta), params_.theta, lgamma(k)));
}

double DensityModel::at(const Sample& s) const {
    switch (s.x_censor) {
        case Censor::at_lower_bound: return boundary(Side::left, s.y);
        case Censor::at_upper_bound: return boundary(Side::right, s.y);
        default: return interior(s.x, s.y);
    }
}

void DensityModel::column_masses(int i, std::span<double> out) const {
    const double x = grid_.x_node(i);
    const double weight = y_renorm_ * std::exp(log_gauss(x, params_.mu, params_.sigma)) * grid_.hx();
    gamma_cells(shape_k(params_, x), params_.theta, grid_, weight, out);
}

void DensityModel::line_masses(Side side, std::span<double> out) const {
    const double k = shape_k(params_, side == Side::left ? 0.0 : 1.0);
    const double weight = y_renorm_ * (side == Side::left ? mass_left_ : mass_right_);
    gamma_cells(k, params_.theta, grid_, weight, out);
}

double DensityModel::total_grid_mass() const {
    std::vector<double> cells(static_cast<std::size_t>(grid_.n_y));
    double total = 0.0;
    for (int i = 0; i < grid_.n_x; ++i) {
        column_masses(i, cells);
        total += std::accumulate(cells.begin(), cells.end(), 0.0);
    }
    for (Side s : {Side::left, Side::right}) {
        line_masses(s, cells);
        total += std::accumulate(cells.begin(), cells.end(), 0.0);
    }
    return total;
}

double neg_log_likelihood(const DensityParams& p, std::span<const Sample> samples, const QuadratureSpec& grid) {
    if (samples.empty()) throw DomainError("neg_log_likelihood: no samples");
    if (!valid(p)) return kInf;
    const double mass = unnormalized_mass(p, grid);
    if (!(mass > 0.0) || !std::isfinite(mass)) return kInf;

    const double log_theta = std::log(p.theta);
    const double k0 = shape_k(p, 0.0);
    const double k1 = shape_k(p, 1.0);
    const double lg0 = lgamma(k0);
    const double lg1 = lgamma(k1);
    const double log_left = std::log(below(0.0, p.mu, p.sigma));
    const double log_right = std::log(above(1.0, p.mu, p.sigma));

    double sum = 0.0;
    for (const auto& s : samples) {
        const double y = std::max(s.y, kYFloor);
        switch (s.x_censor) {
            case Censor::at_lower_bound:
                sum += log_left + log_gamma_pdf(y, k0, log_theta, p.theta, lg0);
                break;
            case Censor::at_upper_bound:
                sum += log_right + log_gamma_pdf(y, k1, log_theta, p.theta, lg1);
                break;
            default: {
                const double k = shape_k(p, s.x);
                sum += log_gauss(s.x, p.mu, p.sigma) + log_gamma_pdf(y, k, log_theta, p.theta, lgamma(k));
            }
        }
    }
    const double nll = -(sum - static_cast<double>(samples.size()) * std::log(mass));
    return std::isnan(nll) ? kInf : nll;
}

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::pair<double, double> mean_sd(const std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double a : v) ss += (a - mean) * (a - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size() > 1 ? v.size() - 1 : 1))};
}

std::vector<double> encode(const DensityParams& p) {
    return {p.mu, std::log(p.sigma), std::log(p.theta), p.alpha1, p.alpha2, p.alpha3, p.alpha4};
}

DensityParams decode(const std::vector<double>& u) {
    return {u[0], std::exp(u[1]), std::exp(u[2]), u[3], u[4], u[5], u[6]};
}

}  // namespace

DensityParams initial_guess(std::span<const Sample> samples) {
    if (samples.empty()) throw DataError("initial_guess: no samples");
    std::vector<double> xs, xs_all, ys;
    for (const auto& s : samples) {
        if (s.x_censor == Censor::interior) xs.push_back(s.x);
        xs_all.push_back(s.x);
        ys.push_back(std::max(s.y, kYFloor));
    }
    if (xs.size() < 2) xs = xs_all;
    const auto [mx, sx] = mean_sd(xs);
    if (!(sx > 1e-9)) throw DataError("degenerate sample: all x values coincide, sigma would collapse to 0");
    const auto [my, sy] = mean_sd(ys);
    if (!(sy > 1e-9)) throw DataError("degenerate sample: all y values coincide");

    DensityParams p;
    p.mu = mx;
    p.sigma = sx;
    p.theta = sy * sy / my;
    const double k = my * my / (sy * sy);
    p.alpha1 = 1.0;
    p.alpha2 = 1.0;
    p.alpha3 = median(xs_all);
    p.alpha4 = std::sqrt(std::max(k - 1.0, 0.05));
    return p;
}

DensityModel fit(std::span<const Sample> samples, const FitOptions& options) {
    if (samples.size() < kMinFitSamples)
        throw DataError("fit needs at least " + std::to_string(kMinFitSamples) + " samples, got " +
                        std::to_string(samples.size()));
    const DensityParams guess = initial_guess(samples);
    const DensityParams start = options.init.value_or(guess);
    const int restarts = std::max(1, options.restarts);

    auto objective = [&](const std::vector<double>& u) {
        return neg_log_likelihood(decode(u), samples, options.grid);
    };

    SimplexOptions simplex;
    simplex.max_evaluations = options.max_evaluations;

    std::vector<SimplexResult> runs(static_cast<std::size_t>(restarts));
#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < restarts; ++r) {
        std::vector<double> u = encode(start);
        if (r > 0) {
            std::mt19937_64 rng(substream_seed(options.seed, static_cast<std::uint64_t>(r)));
            std::normal_distribution<double> jitter(0.0, 1.0);
            u[0] += 0.5 * guess.sigma * jitter(rng);
            for (std::size_t i = 1; i < u.size(); ++i) u[i] += 0.25 * std::max(1.0, std::abs(u[i])) * jitter(rng);
        }
        runs[static_cast<std::size_t>(r)] = nelder_mead(objective, u, simplex);
    }

    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].value < runs[best].value) best = r;

    FitDiagnostics diag;
    diag.restarts = restarts;
    diag.seed = options.seed;
    for (const auto& run : runs) diag.evaluations += run.evaluations;

    // Fresh simplex around the winner guards against a collapsed simplex.
    SimplexResult polished = nelder_mead(objective, runs[best].x, simplex);
    diag.evaluations += polished.evaluations;
    SimplexResult& winner = polished.value <= runs[best].value ? polished : runs[best];
    diag.iterations = runs[best].iterations + polished.iterations;
    diag.nll = winner.value;
    diag.converged = polished.converged;

    DensityParams fitted = decode(winner.x);
    fitted.alpha1 = std::abs(fitted.alpha1);
    fitted.alpha4 = std::abs(fitted.alpha4);

    if (!std::isfinite(winner.value))
        throw FitError("fit: no finite likelihood found", fitted, diag);
    if (!diag.converged)
        throw FitError("fit: simplex did not converge within " + std::to_string(options.max_evaluations) +
                           " evaluations",
                       fitted, diag);
    if (fitted.sigma < 1e-6) throw FitError("fit: sigma collapsed towards 0 (degenerate sample)", fitted, diag);

    DensityModel model = DensityModel::from_params(fitted, options.grid);
    model.set_diagnostics(diag);
    return model;
}

}  // namespace holdout
