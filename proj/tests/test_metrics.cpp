#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "holdout/metrics.hpp"
#include "support/fixtures.hpp"

using namespace holdout;

namespace {

struct PublishedRate {
    std::size_t k, n;
    const char* text;
    double lower, upper;  // percent
};

// Classification rows of the published summary table (training, then
// validation data; rectilinear then optimal).
const PublishedRate kPublished[] = {
    {111, 115, "111/115, 96.5 %", 92.0, 98.9}, {219, 219, "219/219, 100 %", 98.6, 100.0},
    {330, 334, "330/334, 98.8 %", 97.2, 99.6}, {115, 119, "115/119, 96.6 %", 92.3, 99.0},
    {227, 227, "227/227, 100 %", 98.7, 100.0}, {342, 346, "342/346, 98.8 %", 97.3, 99.6},
    {81, 81, "81/81, 100 %", 96.3, 100.0},     {125, 126, "125/126, 99.2 %", 96.3, 100.0},
    {206, 207, "206/207, 99.5 %", 97.7, 100.0}, {81, 82, "81/82, 98.8 %", 94.4, 100.0},
    {157, 158, "157/158, 99.4 %", 97.0, 100.0}, {238, 240, "238/240, 99.2 %", 97.3, 99.9},
};

}  // namespace

TEST_CASE("Clopper-Pearson bounds agree with binomial tail bisection") {
    for (std::size_t n : {1u, 7u, 40u, 119u, 346u}) {
        for (std::size_t k : {std::size_t{0}, n / 3, n / 2, n - 1, n}) {
            for (double tail : {0.05, 0.025}) {
                const auto ci = clopper_pearson(k, n, tail);
                const auto [lo, hi] = fixtures::clopper_pearson_oracle(k, n, tail);
                CHECK(ci.lower == doctest::Approx(lo).epsilon(1e-9));
                CHECK(ci.upper == doctest::Approx(hi).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("published summary rows") {
    for (const auto& row : kPublished) {
        const Rate r = make_rate(row.k, row.n);
        CHECK(format_rate(r) == row.text);
        CHECK(std::abs(100.0 * r.ci.lower - row.lower) <= 0.3);
        CHECK(std::abs(100.0 * r.ci.upper - row.upper) <= 0.3);
    }
    CHECK(format_interval(make_rate(115, 119).ci) == "[92.5 %, 98.8 %]");
    CHECK(format_rate(make_rate(32, 147)) == "32/147, 21.8 %");
    CHECK(format_rate(make_rate(39, 279)) == "39/279, 14.0 %");
}

TEST_CASE("rates without trials are undefined") {
    const Rate r = make_rate(0, 0);
    CHECK_FALSE(r.defined);
    CHECK(r.ci.lower == 0.0);
    CHECK(r.ci.upper == 1.0);
    CHECK(format_rate(r) == "0/0, n/a");
    CHECK_THROWS_AS(clopper_pearson(3, 2), DomainError);
}

TEST_CASE("empirical counts") {
    auto d = [](Klass k) { return ClassDecision{k, 0.9, Region::interior}; };
    const std::vector<std::pair<ClassDecision, Label>> v{
        {d(Klass::positive), Label::positive}, {d(Klass::positive), Label::positive},
        {d(Klass::positive), Label::negative}, {d(Klass::negative), Label::negative},
        {d(Klass::negative), Label::positive}, {d(Klass::indeterminate), Label::positive},
        {d(Klass::indeterminate), Label::negative}, {d(Klass::negative), Label::negative},
    };
    const auto m = empirical_metrics(v);
    CHECK(m.true_positive == 2);
    CHECK(m.false_positive == 1);
    CHECK(m.true_negative == 2);
    CHECK(m.false_negative == 1);
    CHECK(m.total() == 8);
    CHECK(m.sensitivity.value == doctest::Approx(2.0 / 3.0));
    CHECK(m.specificity.value == doctest::Approx(2.0 / 3.0));
    CHECK(m.accuracy.successes == 4);
    CHECK(m.accuracy.trials == 6);
    CHECK(m.holdout_positive.value == doctest::Approx(0.25));
    CHECK(m.holdout_all.value == doctest::Approx(0.25));
}

TEST_CASE("rectilinear cutoffs and hold-out reduction") {
    const RectilinearCutoffs cut{0.4, 0.5};
    CHECK(rectilinear_class({0.1, 0.6, Censor::interior, {}}, cut) == Klass::positive);
    CHECK(rectilinear_class({0.5, 0.5, Censor::interior, {}}, cut) == Klass::positive);
    CHECK(rectilinear_class({0.5, 0.2, Censor::interior, {}}, cut) == Klass::negative);
    CHECK(rectilinear_class({0.2, 0.2, Censor::interior, {}}, cut) == Klass::indeterminate);

    const std::vector<Sample> s{{0.2, 0.2, Censor::interior, Label::negative},
                                {0.3, 0.1, Censor::interior, Label::negative},
                                {0.9, 0.9, Censor::interior, Label::positive},
                                {0.0, 0.3, Censor::at_lower_bound, Label::positive}};
    const std::vector<ClassDecision> opt{{Klass::negative, 0.9, Region::interior},
                                         {Klass::indeterminate, 0.6, Region::interior},
                                         {Klass::positive, 1.0, Region::interior},
                                         {Klass::positive, 0.8, Region::left_boundary}};
    const auto c = compare_rectilinear(s, cut, opt);
    CHECK(c.rectilinear.held_negative + c.rectilinear.held_positive == 3);
    CHECK(c.optimal.held_negative + c.optimal.held_positive == 1);
    CHECK(c.holdout_reduction_percent == doctest::Approx(100.0 * 2.0 / 3.0));
}

TEST_CASE("restricted metric identities") {
    for (std::size_t i = 0; i < 3; ++i) {
        for (double p : {0.2, 0.5}) {
            const auto setup = fixtures::synthetic_setup(i, p, {128, 128});
            const double l = unconstrained_accuracy(setup.field());
            for (double x : {l, 0.97, 0.99}) {
                const auto w = solve_waterline(setup, x);
                const auto m = model_metrics(setup, w);
                const double pd = m.restricted_prevalence;
                CHECK(std::abs(pd + (1.0 - p) * m.mass_n / m.mass_q - 1.0) <= 1e-10);
                CHECK(std::abs(pd * m.sensitivity + (1.0 - pd) * m.specificity - m.achieved_accuracy) <= 1e-8);
                CHECK(std::abs(m.error_restricted - (1.0 - m.achieved_accuracy)) <= 1e-10);
                if (w.unconstrained) CHECK(std::abs(p * m.sensitivity + (1.0 - p) * m.specificity - l) <= 1e-8);
            }
        }
    }
}
