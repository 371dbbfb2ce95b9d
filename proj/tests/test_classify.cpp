#include <doctest.h>

#include <cmath>
#include <set>

#include "holdout/classify.hpp"
#include "holdout/metrics.hpp"
#include "support/fixtures.hpp"

using namespace holdout;

namespace {

Waterline at(double z0) {
    Waterline w;
    w.z0 = w.z_pos = w.z_neg = z0;
    return w;
}

// Achieved accuracy on the grid, summed directly from the cell arrays.
double kept_accuracy(const AccuracyField& f, const HoldoutRule& rule) {
    double c = 0.0, m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double w = rule.kept(f.z[i], f.positive[i] != 0);
        c += w * std::max(f.pq[i], f.nq[i]);
        m += w * f.q[i];
    }
    return c / m;
}

}  // namespace

TEST_CASE("local accuracy at a point") {
    const auto a = local_accuracy(0.5, 3.0, 1.0);
    CHECK(a.z_star == doctest::Approx(0.75));
    CHECK(a.binary_class == Label::positive);
    const auto b = local_accuracy(0.2, 1.0, 1.0);
    CHECK(b.z_star == doctest::Approx(0.8));
    CHECK(b.binary_class == Label::negative);
    CHECK(local_accuracy(0.5, 2.0, 2.0).binary_class == Label::positive);
    CHECK_THROWS_AS(local_accuracy(0.5, 0.0, 0.0), UnsupportedPoint);
}

TEST_CASE("threshold rule") {
    CHECK(classify({1.0, Label::negative}, Region::interior, at(0.99)).klass == Klass::negative);
    CHECK(classify({0.5, Label::positive}, Region::interior, at(0.6)).klass == Klass::indeterminate);
    CHECK(classify({0.85, Label::positive}, Region::interior, at(0.9)).klass == Klass::indeterminate);
    CHECK(classify({0.85, Label::positive}, Region::interior, at(0.8)).klass == Klass::positive);
    Waterline split = at(0.8);
    split.z_pos = 0.9;
    CHECK(classify({0.85, Label::positive}, Region::left_boundary, split).klass == Klass::indeterminate);
    CHECK(classify({0.85, Label::negative}, Region::left_boundary, split).klass == Klass::negative);
    CHECK(classify({0.85, Label::negative}, Region::left_boundary, split).region == Region::left_boundary);
}

TEST_CASE("constraint integral on a toy field") {
    const auto f = field_from_masses(0.5, {0.4, 0.1, 0.3, 0.2, 0.0}, {0.0, 0.3, 0.1, 0.2, 0.4});
    CHECK(constraint_integral(f, 0.0, 0.8) == doctest::Approx(0.0));
    CHECK(unconstrained_accuracy(f) == doctest::Approx(0.8));
    CHECK(constraint_integral(f, 0.6, 0.9) == doctest::Approx((0.2 + 0.15 + 0.15 + 0.2) / 0.8 - 0.9));
    CHECK_THROWS_AS(constraint_integral(f, 1.01, 0.9), EmptyRegion);
}

TEST_CASE("target at or below the unconstrained accuracy needs no hold-out") {
    const auto f = field_from_masses(0.5, {0.4, 0.1}, {0.1, 0.4});
    const auto w = solve_waterline(f, 0.7);
    CHECK(w.unconstrained);
    CHECK(w.z0 == 0.5);
    CHECK(w.converged);
    CHECK(w.trace.empty());
}

TEST_CASE("infeasible targets fail before bisection") {
    const auto f = field_from_masses(0.5, {0.4, 0.1}, {0.1, 0.4});
    CHECK_THROWS_AS(solve_waterline(f, 0.81), InfeasibleTarget);
    CHECK_NOTHROW(solve_waterline(f, 0.8));
}

TEST_CASE("a level set with finite mass is kept in part") {
    // Levels 0.6 (mass 0.5) and 0.9 (mass 0.5); accuracy 0.8 needs half of
    // the lower level: (0.45 + 0.3 f) / (0.5 + 0.5 f) = 0.8 at f = 1/2.
    const auto f = field_from_masses(0.5, {0.6, 0.9}, {0.4, 0.1});
    const auto w = solve_waterline(f, 0.8);
    CHECK(w.c_set_detected);
    CHECK(w.converged);
    CHECK(w.c_keep_fraction == doctest::Approx(0.5));
    CHECK(w.c_mass_deficit == doctest::Approx(0.25));
    CHECK(w.c_band_low <= 0.6);
    CHECK(w.z0 > 0.6);
    CHECK(w.z0 <= 0.9);
    CHECK(model_metrics(f, w).achieved_accuracy == doctest::Approx(0.8).epsilon(1e-12));
    // A sample on the level set is held out in full.
    CHECK(classify({0.6, Label::positive}, Region::interior, w).klass == Klass::indeterminate);
    CHECK(classify({0.9, Label::positive}, Region::interior, w).klass == Klass::positive);
}

TEST_CASE("bisection steps halve exactly") {
    const auto setup = fixtures::synthetic_setup(0, 0.5, {128, 128});
    for (double eps : {1e-4, 0.0}) {
        const auto w = solve_waterline(setup, 0.99, eps, 40);
        REQUIRE(!w.trace.empty());
        CHECK(w.trace.front().zeta == 0.75);
        for (std::size_t j = 0; j + 1 < w.trace.size(); ++j)
            CHECK(std::abs(w.trace[j + 1].zeta - w.trace[j].zeta) == std::ldexp(1.0, -static_cast<int>(j + 3)));
        if (eps == 0.0) {
            CHECK(w.iterations == 40);
            CHECK(w.bracket_width <= std::ldexp(1.0, -37));
        }
    }
}

TEST_CASE("constraint integral is nondecreasing over the achievable levels") {
    const auto setup = fixtures::synthetic_setup(1, 0.5, {96, 96});
    const auto& f = setup.field();
    std::set<double> levels(f.z.begin(), f.z.end());
    double prev = -1.0;
    std::size_t k = 0;
    for (double z : levels) {
        if (k++ % 25) continue;
        const double v = constraint_integral(f, z, 0.0);
        CHECK(v >= prev - 1e-10);
        prev = v;
    }
}

TEST_CASE("separable fixture matches the dense scan oracle") {
    const auto setup = fixtures::line_setup();
    CHECK(unconstrained_accuracy(setup.field()) == doctest::Approx(fixtures::Phi(1.0)).epsilon(1e-4));
    for (double x : {0.90, 0.95, 0.99}) {
        const auto w = solve_waterline(setup, x);
        const auto oracle = fixtures::line_oracle(x);
        CHECK(w.converged);
        const double acc = model_metrics(setup, w).achieved_accuracy;
        CHECK(std::abs(acc - x) <= 2 * w.eps_x);
        CHECK(std::abs(acc - kept_accuracy(setup.field(), w.rule())) < 1e-12);
        CHECK(std::abs(w.z0 - oracle.z0) <= std::ldexp(1.0, -17) + inter_level_gap(setup.field(), w.z0));
    }
}

TEST_CASE("raising the positive waterline meets a specificity target") {
    const auto setup = fixtures::synthetic_setup(1, 0.5, {128, 128});
    const auto& f = setup.field();
    const auto base = solve_waterline(setup, 0.97);
    const double target = 0.995;
    REQUIRE(model_metrics(setup, base).specificity < target);

    const auto w = raise_class_waterline(setup, base, Label::positive, target);
    CHECK(w.z_pos > base.z0);
    CHECK(w.z0 == base.z0);
    CHECK(model_metrics(setup, w).specificity >= target);

    // Brute force: every distinct positive-class level in ascending order,
    // specificity from direct cell sums.
    std::set<double> levels;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f.supported(i) && f.positive[i] && f.z[i] > base.z_pos) levels.insert(f.z[i]);
    double expected = 1.0;
    for (double t : levels) {
        double tn = 0.0, fp = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const bool pos = f.positive[i] != 0;
            const double w_i = pos ? (f.z[i] >= t ? 1.0 : 0.0) : base.rule().kept(f.z[i], false);
            (pos ? fp : tn) += w_i * f.neg_mass[i];
        }
        if (tn / (tn + fp) >= target) {
            expected = t;
            break;
        }
    }
    CHECK(w.z_pos == expected);
}

TEST_CASE("raising is a no-op when the target already holds") {
    const auto setup = fixtures::synthetic_setup(0, 0.5, {128, 128});
    const auto base = solve_waterline(setup, 0.97);
    const auto w = raise_class_waterline(setup, base, Label::negative, 0.5);
    CHECK(w.z_pos == base.z_pos);
    CHECK(w.z_neg == base.z_neg);
}

TEST_CASE("empirical class targets") {
    const auto f = field_from_masses(0.5, {0.6, 0.9, 0.05}, {0.4, 0.1, 0.95});
    const auto base = solve_waterline(f, 0.8);
    // Two true negatives misclassified as positive with modest Z*; the one at
    // 0.9 is removed once the waterline passes 0.9.
    std::vector<ScoredSample> labeled{
        {0.95, Label::negative, Label::negative}, {0.95, Label::negative, Label::negative},
        {0.9, Label::positive, Label::negative},  {0.9, Label::positive, Label::positive},
    };
    const auto w = raise_class_waterline(f, base, Label::positive, 1.0, labeled);
    CHECK(w.z_pos > 0.9);
    // A false positive at Z* = 1 can never be removed.
    labeled.push_back({1.0, Label::positive, Label::negative});
    CHECK_THROWS_AS(raise_class_waterline(f, base, Label::positive, 1.0, labeled), InfeasibleTarget);
}

TEST_CASE("solver parameters are validated") {
    const auto f = field_from_masses(0.5, {0.6, 0.9}, {0.4, 0.1});
    CHECK_THROWS_AS(solve_waterline(f, 1.2), DomainError);
    CHECK_THROWS_AS(solve_waterline(f, 0.8, -1.0), DomainError);
    CHECK_THROWS_AS(solve_waterline(f, 0.8, 1e-4, 0), DomainError);
    CHECK_THROWS_AS(ClassifierSetup(DensityModel::from_params(default_positive_params()),
                                    DensityModel::from_params(default_negative_params()), 0.5, {32, 32}),
                    DomainError);
}
