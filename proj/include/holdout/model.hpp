#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "holdout/error.hpp"
#include "holdout/quadrature.hpp"
#include "holdout/transform.hpp"
#include "holdout/types.hpp"

namespace holdout {

// Gaussian in x, Gamma in y with a shape that follows a sigmoid in x.
struct DensityParams {
    double mu = 0.5;
    double sigma = 0.1;
    double theta = 0.1;
    double alpha1 = 1.0;
    double alpha2 = 1.0;
    double alpha3 = 0.5;
    double alpha4 = 1.0;

    bool operator==(const DensityParams&) const = default;
};

struct FitDiagnostics {
    double nll = 0.0;
    int iterations = 0;
    int evaluations = 0;
    int restarts = 0;
    std::uint64_t seed = 0;
    bool converged = false;
};

// k(x) = a1^2 [tanh(a2 (x - a3)) + 1] + a4^2
double shape_k(const DensityParams& params, double x);

// Mixed continuous / boundary-mass density of one class. Latent x values
// outside [0, 1] are censored onto the lines x = 0 and x = 1; y is truncated
// to [0, 1]. A single constant (y_renorm) restores unit mass on the grid.
class DensityModel {
public:
    DensityModel() = default;

    // Throws DomainError when sigma <= 0, theta <= 0 or k(x) is not positive.
    static DensityModel from_params(const DensityParams& params, const QuadratureSpec& grid = {},
                                    ScaleRecord scale = {});

    const DensityParams& params() const { return params_; }
    double mass_left() const { return mass_left_; }
    double mass_right() const { return mass_right_; }
    double y_renorm() const { return y_renorm_; }
    const QuadratureSpec& grid() const { return grid_; }
    const ScaleRecord& scale() const { return scale_; }
    const std::optional<FitDiagnostics>& diagnostics() const { return diagnostics_; }

    void set_scale(const ScaleRecord& s) { scale_ = s; }
    void set_diagnostics(const FitDiagnostics& d) { diagnostics_ = d; }

    // Same parameters, normalization recomputed on another grid.
    DensityModel renormalized(const QuadratureSpec& grid) const;

    // Density for 0 < x < 1. y is clamped to >= 1e-9.
    double interior(double x, double y) const;
    // Line density on x = 0 (left) or x = 1 (right).
    double boundary(Side side, double y) const;
    // Dispatches on the sample's censoring flag.
    double at(const Sample& s) const;

    // Probability mass of grid column i split into n_y y-cells; out.size() == n_y.
    void column_masses(int i, std::span<double> out) const;
    // Mass of each y-cell on a boundary line.
    void line_masses(Side side, std::span<double> out) const;

    // Interior + both boundary lines summed over the grid (1 up to rounding).
    double total_grid_mass() const;

private:
    DensityParams params_;
    QuadratureSpec grid_;
    ScaleRecord scale_;
    double mass_left_ = 0.0;
    double mass_right_ = 0.0;
    double y_renorm_ = 1.0;
    std::optional<FitDiagnostics> diagnostics_;
};

inline double density_interior(const DensityModel& m, double x, double y) { return m.interior(x, y); }
inline double density_boundary(const DensityModel& m, Side side, double y) { return m.boundary(side, y); }

// Unnormalized mass: x by midpoint over grid.n_x nodes, y exactly via the
// regularized incomplete gamma function. Its reciprocal is y_renorm.
double unnormalized_mass(const DensityParams& params, const QuadratureSpec& grid);

// -sum log L(sample) with the censored likelihood; +inf when any sample has
// zero likelihood or the parameters are invalid.
double neg_log_likelihood(const DensityParams& params, std::span<const Sample> samples,
                          const QuadratureSpec& grid = {});

struct FitOptions {
    std::optional<DensityParams> init;
    int restarts = 8;
    std::uint64_t seed = 0;
    int max_evaluations = 20000;  // per restart
    QuadratureSpec grid;
};

class FitError : public Error {
public:
    FitError(const std::string& what, DensityParams best, FitDiagnostics diag)
        : Error(what), best_(best), diag_(diag) {}
    const DensityParams& best() const { return best_; }
    const FitDiagnostics& diagnostics() const { return diag_; }

private:
    DensityParams best_;
    FitDiagnostics diag_;
};

inline constexpr std::size_t kMinFitSamples = 20;

// Moment-based starting point used by the first restart.
DensityParams initial_guess(std::span<const Sample> samples);

// Censored maximum likelihood over (mu, log sigma, log theta, alpha1..4) with
// a Nelder-Mead simplex and jittered multistarts. Deterministic given
// (samples, options).
DensityModel fit(std::span<const Sample> samples, const FitOptions& options = {});

}  // namespace holdout
