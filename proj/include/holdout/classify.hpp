#pragma once

#include <optional>
#include <span>
#include <vector>

#include "holdout/field.hpp"
#include "holdout/model.hpp"
#include "holdout/types.hpp"

namespace holdout {

// Positive and negative models at a fixed prevalence, with the accuracy
// field evaluated once on the shared quadrature grid. Both models are
// renormalized onto that grid.
class ClassifierSetup {
public:
    ClassifierSetup(DensityModel pos, DensityModel neg, double prevalence, QuadratureSpec grid = {});

    const DensityModel& positive() const { return pos_; }
    const DensityModel& negative() const { return neg_; }
    double prevalence() const { return prevalence_; }
    const QuadratureSpec& grid() const { return grid_; }
    const AccuracyField& field() const { return field_; }

private:
    DensityModel pos_;
    DensityModel neg_;
    double prevalence_;
    QuadratureSpec grid_;
    AccuracyField field_;
};

struct BisectionStep {
    double zeta = 0.0;
    double value = 0.0;  // normalized constraint integral at zeta
};

struct Waterline {
    double target_x = 0.0;
    double z0 = 0.5;
    double z_pos = 0.5;
    double z_neg = 0.5;
    double eps_x = 1e-4;
    int max_iter = 40;
    int iterations = 0;
    bool converged = false;
    bool unconstrained = false;

    // Level set {Z* = Z0} carrying finite mass: cells in [c_band_low, z0)
    // stay classified with weight c_keep_fraction on the grid; per-sample
    // classification holds all of them out.
    bool c_set_detected = false;
    double c_mass_deficit = 0.0;
    double c_band_low = 2.0;
    double c_keep_fraction = 0.0;

    // After raising one class waterline: the global accuracy inequality
    // could not be restored.
    bool accuracy_violated = false;

    double bracket_width = 1.0;
    std::vector<BisectionStep> trace;

    HoldoutRule rule() const;
};

struct AccuracyAtPoint {
    double z_star = 0.5;
    Label binary_class = Label::positive;
};

struct ClassDecision {
    Klass klass = Klass::indeterminate;
    double local_accuracy = 0.5;
    Region region = Region::interior;
};

// Z* and the argmax class at a sample; ties go to positive. Throws
// UnsupportedPoint when both densities vanish.
AccuracyAtPoint local_accuracy(const ClassifierSetup& setup, const Sample& sample);
AccuracyAtPoint local_accuracy(double prevalence, double pos_density, double neg_density);

// [sum over D(zeta) of (Z* - X) Q] / [sum over D(zeta) of Q], D(zeta) = {Z* >= zeta}.
// Throws EmptyRegion when D(zeta) carries no mass.
double constraint_integral(const AccuracyField& field, double zeta, double target_x);
double constraint_integral(const ClassifierSetup& setup, double zeta, double target_x);

// Average Z* over the whole grid (accuracy without hold-out).
double unconstrained_accuracy(const AccuracyField& field);

inline constexpr double kDefaultEpsX = 1e-4;
inline constexpr int kDefaultMaxIter = 40;

// Bisection for the waterline: zeta_0 = 3/4, step 2^-(j+3) against the sign
// of the constraint integral, stop at |I| <= eps_x or after max_iter steps.
// Throws InfeasibleTarget when no hold-out reaches target_x.
Waterline solve_waterline(const AccuracyField& field, double target_x, double eps_x = kDefaultEpsX,
                          int max_iter = kDefaultMaxIter);
Waterline solve_waterline(const ClassifierSetup& setup, double target_x, double eps_x = kDefaultEpsX,
                          int max_iter = kDefaultMaxIter);

ClassDecision classify(const ClassifierSetup& setup, const Waterline& waterline, const Sample& sample);
ClassDecision classify(const AccuracyAtPoint& acc, Region region, const Waterline& waterline);

// A sample scored by the classifier together with its true label.
struct ScoredSample {
    double z_star = 0.5;
    Label binary_class = Label::positive;
    Label truth = Label::positive;
};

// Raises z_pos (side = positive; drives restricted specificity up) or z_neg
// (side = negative; drives restricted sensitivity up) over the grid's Z*
// levels until the metric reaches `target`. The metric is model-predicted
// unless labeled samples are supplied, in which case it is empirical.
// Throws InfeasibleTarget when the target is not met at threshold 1.
Waterline raise_class_waterline(const AccuracyField& field, const Waterline& base, Label side, double target,
                                std::span<const ScoredSample> labeled = {});
Waterline raise_class_waterline(const ClassifierSetup& setup, const Waterline& base, Label side,
                                double target, std::span<const Sample> labeled = {});

std::vector<ScoredSample> score_samples(const ClassifierSetup& setup, std::span<const Sample> labeled);

}  // namespace holdout
