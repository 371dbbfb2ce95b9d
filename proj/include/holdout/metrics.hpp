#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "holdout/classify.hpp"
#include "holdout/field.hpp"

namespace holdout {

struct ModelMetrics {
    double target_x = 0.0;
    double mass_p = 1.0;  // N_P: P mass of the classified region
    double mass_n = 1.0;  // N_N
    double mass_q = 1.0;  // N_Q
    double sensitivity = 0.0;
    double specificity = 0.0;
    double restricted_prevalence = 0.0;
    double achieved_accuracy = 0.0;
    double holdout_mass = 0.0;
    double error_total = 0.0;       // false positive + false negative rates
    double error_restricted = 0.0;  // error_total / N_Q
};

ModelMetrics model_metrics(const AccuracyField& field, const Waterline& waterline);
ModelMetrics model_metrics(const ClassifierSetup& setup, const Waterline& waterline);

struct Interval {
    double lower = 0.0;
    double upper = 1.0;
};

// Exact binomial (Clopper-Pearson) bounds; each bound leaves probability
// tail_alpha outside. tail_alpha = 0.05 gives one-sided 95 % bounds.
Interval clopper_pearson(std::size_t successes, std::size_t trials, double tail_alpha = 0.05);

struct Rate {
    std::size_t successes = 0;
    std::size_t trials = 0;
    double value = 0.0;
    Interval ci;
    bool defined = false;  // false when trials == 0; ci is then [0, 1]
};

Rate make_rate(std::size_t successes, std::size_t trials, double tail_alpha = 0.05);

struct EmpiricalMetrics {
    std::size_t true_positive = 0;
    std::size_t false_positive = 0;
    std::size_t true_negative = 0;
    std::size_t false_negative = 0;
    std::size_t held_positive = 0;  // truly positive samples held out
    std::size_t held_negative = 0;
    std::size_t total() const {
        return true_positive + false_positive + true_negative + false_negative + held_positive + held_negative;
    }

    Rate sensitivity;
    Rate specificity;
    Rate accuracy;
    Rate holdout_positive;
    Rate holdout_negative;
    Rate holdout_all;
};

EmpiricalMetrics empirical_metrics(std::span<const std::pair<ClassDecision, Label>> decisions,
                                   double tail_alpha = 0.05);

struct RectilinearCutoffs {
    double x_cut = 0.0;
    double y_cut = 0.0;
};

// y >= y_cut: positive; y < y_cut and x >= x_cut: negative; otherwise
// indeterminate.
Klass rectilinear_class(const Sample& s, const RectilinearCutoffs& cut);

struct Comparison {
    EmpiricalMetrics rectilinear;
    EmpiricalMetrics optimal;
    double holdout_reduction_percent = 0.0;  // relative to rectilinear hold-outs
};

Comparison compare_rectilinear(std::span<const Sample> labeled, const RectilinearCutoffs& cut,
                               std::span<const ClassDecision> optimal, double tail_alpha = 0.05);

// "115/119, 96.6 %"
std::string format_rate(const Rate& r);
// "[92.3 %, 99.0 %]"
std::string format_interval(const Interval& ci);

}  // namespace holdout
