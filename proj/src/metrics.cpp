#include "holdout/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include <boost/math/special_functions/beta.hpp>

namespace holdout {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double ratio(double num, double den) { return den > 0.0 ? num / den : kNaN; }

std::string percent(double v) {
    const double pct = 100.0 * v;
    char buf[32];
    if (pct == 100.0)
        std::snprintf(buf, sizeof buf, "100 %%");
    else
        std::snprintf(buf, sizeof buf, "%.1f %%", pct);
    return buf;
}

}  // namespace

ModelMetrics model_metrics(const AccuracyField& field, const Waterline& wl) {
    const double p = field.prevalence;
    const DomainSums s = sum_domains(field, wl.rule());
    ModelMetrics m;
    m.target_x = wl.target_x;
    m.mass_p = s.mass_p();
    m.mass_n = s.mass_n();
    m.mass_q = s.mass_q(p);
    m.sensitivity = ratio(s.p_in_pos, m.mass_p);
    m.specificity = ratio(s.n_in_neg, m.mass_n);
    m.restricted_prevalence = ratio(p * m.mass_p, m.mass_q);
    m.achieved_accuracy = ratio(s.correct(p), m.mass_q);
    m.holdout_mass = s.q_held;
    m.error_total = s.errors(p);
    m.error_restricted = ratio(m.error_total, m.mass_q);
    return m;
}

ModelMetrics model_metrics(const ClassifierSetup& setup, const Waterline& wl) {
    return model_metrics(setup.field(), wl);
}

Interval clopper_pearson(std::size_t k, std::size_t n, double tail_alpha) {
    if (k > n) throw DomainError("clopper_pearson: successes exceed trials");
    if (!(tail_alpha > 0.0 && tail_alpha < 1.0)) throw DomainError("clopper_pearson: tail probability out of range");
    if (n == 0) return {0.0, 1.0};
    const auto a = static_cast<double>(k);
    const auto b = static_cast<double>(n - k);
    Interval ci;
    ci.lower = k == 0 ? 0.0 : boost::math::ibeta_inv(a, b + 1.0, tail_alpha);
    ci.upper = k == n ? 1.0 : boost::math::ibeta_inv(a + 1.0, b, 1.0 - tail_alpha);
    return ci;
}

Rate make_rate(std::size_t successes, std::size_t trials, double tail_alpha) {
    Rate r;
    r.successes = successes;
    r.trials = trials;
    r.defined = trials > 0;
    r.value = r.defined ? static_cast<double>(successes) / static_cast<double>(trials) : kNaN;
    r.ci = clopper_pearson(successes, trials, tail_alpha);
    return r;
}

EmpiricalMetrics empirical_metrics(std::span<const std::pair<ClassDecision, Label>> decisions, double tail_alpha) {
    EmpiricalMetrics m;
    for (const auto& [d, truth] : decisions) {
        const bool pos = truth == Label::positive;
        switch (d.klass) {
            case Klass::positive: (pos ? m.true_positive : m.false_positive)++; break;
            case Klass::negative: (pos ? m.false_negative : m.true_negative)++; break;
            case Klass::indeterminate: (pos ? m.held_positive : m.held_negative)++; break;
        }
    }
    const std::size_t positives = m.true_positive + m.false_negative + m.held_positive;
    const std::size_t negatives = m.true_negative + m.false_positive + m.held_negative;
    const std::size_t classified = m.true_positive + m.false_positive + m.true_negative + m.false_negative;
    m.sensitivity = make_rate(m.true_positive, m.true_positive + m.false_negative, tail_alpha);
    m.specificity = make_rate(m.true_negative, m.true_negative + m.false_positive, tail_alpha);
    m.accuracy = make_rate(m.true_positive + m.true_negative, classified, tail_alpha);
    m.holdout_positive = make_rate(m.held_positive, positives, tail_alpha);
    m.holdout_negative = make_rate(m.held_negative, negatives, tail_alpha);
    m.holdout_all = make_rate(m.held_positive + m.held_negative, m.total(), tail_alpha);
    return m;
}

Klass rectilinear_class(const Sample& s, const RectilinearCutoffs& cut) {
    if (s.y >= cut.y_cut) return Klass::positive;
    if (s.x >= cut.x_cut) return Klass::negative;
    return Klass::indeterminate;
}

Comparison compare_rectilinear(std::span<const Sample> labeled, const RectilinearCutoffs& cut,
                               std::span<const ClassDecision> optimal, double tail_alpha) {
    if (labeled.size() != optimal.size())
        throw DomainError("compare_rectilinear: one optimal decision per sample is required");
    std::vector<std::pair<ClassDecision, Label>> rect, opt;
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        if (!labeled[i].label) continue;
        ClassDecision d;
        d.klass = rectilinear_class(labeled[i], cut);
        d.region = region_of(labeled[i].x_censor);
        rect.emplace_back(d, *labeled[i].label);
        opt.emplace_back(optimal[i], *labeled[i].label);
    }
    Comparison c;
    c.rectilinear = empirical_metrics(rect, tail_alpha);
    c.optimal = empirical_metrics(opt, tail_alpha);
    const auto rect_held = static_cast<double>(c.rectilinear.held_positive + c.rectilinear.held_negative);
    const auto opt_held = static_cast<double>(c.optimal.held_positive + c.optimal.held_negative);
    c.holdout_reduction_percent = rect_held > 0.0 ? 100.0 * (rect_held - opt_held) / rect_held : 0.0;
    return c;
}

std::string format_rate(const Rate& r) {
    const std::string counts = std::to_string(r.successes) + "/" + std::to_string(r.trials);
    return counts + ", " + (r.defined ? percent(r.value) : std::string("n/a"));
}

std::string format_interval(const Interval& ci) { return "[" + percent(ci.lower) + ", " + percent(ci.upper) + "]"; }

}  // namespace holdout
