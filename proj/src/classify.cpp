#include "holdout/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace holdout {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_target(double target_x, double eps_x, int max_iter) {
    if (!(target_x >= 0.0 && target_x <= 1.0)) throw DomainError("target accuracy must lie in [0, 1]");
    if (!(eps_x >= 0.0)) throw DomainError("bisection tolerance must be non-negative");
    if (max_iter < 1) throw DomainError("bisection needs at least one iteration");
}

// correct - X * mass over the kept region: the unnormalized constraint integral.
double excess(const DomainSums& s, double p, double target_x) { return s.correct(p) - target_x * s.mass_q(p); }

double accuracy_of(const DomainSums& s, double p) {
    const double mq = s.mass_q(p);
    return mq > 0.0 ? s.correct(p) / mq : 0.0;
}

// Cells of one binary class sorted by Z*, with suffix sums of their masses
// so the kept mass above any threshold is a lookup.
struct Ladder {
    std::vector<double> z;
    std::vector<double> p_suffix;
    std::vector<double> n_suffix;

    Ladder(const AccuracyField& f, bool positive) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < f.size(); ++i)
            if (f.supported(i) && (f.positive[i] != 0) == positive) idx.push_back(i);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return f.z[a] < f.z[b]; });
        z.resize(idx.size());
        p_suffix.assign(idx.size() + 1, 0.0);
        n_suffix.assign(idx.size() + 1, 0.0);
        for (std::size_t k = idx.size(); k-- > 0;) {
            z[k] = f.z[idx[k]];
            p_suffix[k] = p_suffix[k + 1] + f.pos_mass[idx[k]];
            n_suffix[k] = n_suffix[k + 1] + f.neg_mass[idx[k]];
        }
    }

    std::pair<double, double> kept(double threshold) const {
        const auto k = static_cast<std::size_t>(std::lower_bound(z.begin(), z.end(), threshold) - z.begin());
        return {p_suffix[k], n_suffix[k]};
    }

    // Distinct levels strictly above `from`, ascending, closed by 1.
    std::vector<double> levels_above(double from) const {
        std::vector<double> out;
        for (double v : z)
            if (v > from && (out.empty() || v > out.back())) out.push_back(v);
        if (out.empty() || out.back() < 1.0) out.push_back(1.0);
        return out;
    }
};

void set_class(DomainSums& s, bool positive, std::pair<double, double> kept) {
    if (positive) {
        s.p_in_pos = kept.first;
        s.n_in_pos = kept.second;
    } else {
        s.p_in_neg = kept.first;
        s.n_in_neg = kept.second;
    }
}

// Restricted specificity (side positive) or sensitivity (side negative);
// NaN when its denominator vanishes.
double model_metric(const DomainSums& s, Label side) {
    const double num = side == Label::positive ? s.n_in_neg : s.p_in_pos;
    const double den = side == Label::positive ? s.n_in_neg + s.n_in_pos : s.p_in_pos + s.p_in_neg;
    return den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
}

double empirical_metric(std::span<const ScoredSample> labeled, double z_pos, double z_neg, Label side) {
    std::size_t num = 0, den = 0;
    for (const auto& s : labeled) {
        const bool kept = s.z_star >= (s.binary_class == Label::positive ? z_pos : z_neg);
        if (!kept) continue;
        if (side == Label::positive && s.truth == Label::negative) {
            ++den;
            num += s.binary_class == Label::negative;
        } else if (side == Label::negative && s.truth == Label::positive) {
            ++den;
            num += s.binary_class == Label::positive;
        }
    }
    return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

ClassifierSetup::ClassifierSetup(DensityModel pos, DensityModel neg, double prevalence, QuadratureSpec grid)
    : pos_(pos.renormalized(grid)), neg_(neg.renormalized(grid)), prevalence_(prevalence), grid_(grid) {
    if (!(prevalence >= 0.0 && prevalence <= 1.0)) throw DomainError("prevalence must lie in [0, 1]");
    if (grid.n_x < kMinGridNodes || grid.n_y < kMinGridNodes)
        throw DomainError("grid needs at least " + std::to_string(kMinGridNodes) + " nodes per axis");
    field_ = build_field(pos_, neg_, prevalence_, grid_);
}

HoldoutRule Waterline::rule() const { return {z_pos, z_neg, c_band_low, z0, c_keep_fraction}; }

AccuracyAtPoint local_accuracy(double prevalence, double pos_density, double neg_density) {
    const double pq = prevalence * pos_density;
    const double nq = (1.0 - prevalence) * neg_density;
    const double q = pq + nq;
    if (!(q > 0.0) || !std::isfinite(q)) throw UnsupportedPoint("both class densities vanish at this point");
    if (pq >= nq) return {pq / q, Label::positive};
    return {nq / q, Label::negative};
}

AccuracyAtPoint local_accuracy(const ClassifierSetup& setup, const Sample& sample) {
    return local_accuracy(setup.prevalence(), setup.positive().at(sample), setup.negative().at(sample));
}

double constraint_integral(const AccuracyField& field, double zeta, double target_x) {
    const DomainSums s = sum_domains(field, HoldoutRule::uniform(zeta));
    const double mq = s.mass_q(field.prevalence);
    if (!(mq > 0.0)) throw EmptyRegion("no probability mass with local accuracy >= " + std::to_string(zeta));
    return s.correct(field.prevalence) / mq - target_x;
}

double constraint_integral(const ClassifierSetup& setup, double zeta, double target_x) {
    return constraint_integral(setup.field(), zeta, target_x);
}

double unconstrained_accuracy(const AccuracyField& field) { return constraint_integral(field, 0.0, 0.0); }

Waterline solve_waterline(const AccuracyField& field, double target_x, double eps_x, int max_iter) {
    check_target(target_x, eps_x, max_iter);
    Waterline wl;
    wl.target_x = target_x;
    wl.eps_x = eps_x;
    wl.max_iter = max_iter;

    if (target_x <= unconstrained_accuracy(field)) {
        wl.unconstrained = true;
        wl.converged = true;
        wl.bracket_width = 0.0;
        return wl;
    }
    const double top = max_level(field);
    if (top < target_x)
        throw InfeasibleTarget("target accuracy " + std::to_string(target_x) +
                               " exceeds the highest local accuracy " + std::to_string(top));

    const double p = field.prevalence;
    auto integral = [&](double zeta) {
        const DomainSums s = sum_domains(field, HoldoutRule::uniform(zeta));
        const double mq = s.mass_q(p);
        return mq > 0.0 ? s.correct(p) / mq - target_x : kInf;  // empty: too strict
    };

    double zeta = 0.75;
    for (int j = 0; j < max_iter; ++j) {
        const double value = integral(zeta);
        wl.trace.push_back({zeta, value});
        wl.iterations = j + 1;
        if (std::abs(value) <= eps_x) {
            wl.converged = true;
            wl.z0 = wl.z_pos = wl.z_neg = zeta;
            wl.bracket_width = std::ldexp(1.0, -(j + 2));
            return wl;
        }
        zeta += (value < 0.0 ? 1.0 : -1.0) * std::ldexp(1.0, -(j + 3));
    }
    wl.bracket_width = std::ldexp(1.0, -(max_iter + 1));

    // No iterate met the tolerance: the constraint integral jumps across the
    // final bracket, so a level set of finite mass sits inside it. Keep the
    // part of that set which makes the kept-region accuracy exactly X.
    double lo = 0.5, hi = top;
    for (const auto& step : wl.trace) {
        if (step.value < 0.0) lo = std::max(lo, step.zeta);
        if (step.value > 0.0 && step.zeta <= top) hi = std::min(hi, step.zeta);
    }
    if (hi <= lo) hi = top;
    const DomainSums above = sum_domains(field, HoldoutRule::uniform(hi));
    const DomainSums from_lo = sum_domains(field, HoldoutRule::uniform(lo));
    const double a = excess(above, p, target_x);
    const double b = excess(from_lo, p, target_x) - a;
    const double band_mass = from_lo.mass_q(p) - above.mass_q(p);
    const double keep = b < 0.0 ? std::clamp(a / -b, 0.0, 1.0) : 0.0;

    double zmin = kInf, zmax = -kInf;
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (!field.supported(i) || field.z[i] < lo || field.z[i] >= hi) continue;
        zmin = std::min(zmin, field.z[i]);
        zmax = std::max(zmax, field.z[i]);
    }

    wl.z0 = wl.z_pos = wl.z_neg = hi;
    wl.c_band_low = lo;
    wl.c_keep_fraction = keep;
    wl.c_mass_deficit = (1.0 - keep) * band_mass;
    const double i_hi = above.mass_q(p) > 0.0 ? a / above.mass_q(p) : kInf;
    const double i_lo = from_lo.mass_q(p) > 0.0 ? excess(from_lo, p, target_x) / from_lo.mass_q(p) : -kInf;
    wl.c_set_detected = i_hi - i_lo > 4.0 * eps_x;
    wl.converged = zmax - zmin <= 1e-12 || zmin == kInf;
    return wl;
}

Waterline solve_waterline(const ClassifierSetup& setup, double target_x, double eps_x, int max_iter) {
    return solve_waterline(setup.field(), target_x, eps_x, max_iter);
}

ClassDecision classify(const AccuracyAtPoint& acc, Region region, const Waterline& wl) {
    const double threshold = acc.binary_class == Label::positive ? wl.z_pos : wl.z_neg;
    ClassDecision d;
    d.local_accuracy = acc.z_star;
    d.region = region;
    if (acc.z_star >= threshold) d.klass = acc.binary_class == Label::positive ? Klass::positive : Klass::negative;
    return d;
}

ClassDecision classify(const ClassifierSetup& setup, const Waterline& wl, const Sample& sample) {
    return classify(local_accuracy(setup, sample), region_of(sample.x_censor), wl);
}

std::vector<ScoredSample> score_samples(const ClassifierSetup& setup, std::span<const Sample> labeled) {
    std::vector<ScoredSample> out;
    out.reserve(labeled.size());
    for (const auto& s : labeled) {
        if (!s.label) continue;
        AccuracyAtPoint acc;
        try {
            acc = local_accuracy(setup, s);
        } catch (const UnsupportedPoint&) {
            acc = {0.5, Label::positive};
        }
        out.push_back({acc.z_star, acc.binary_class, *s.label});
    }
    return out;
}

Waterline raise_class_waterline(const AccuracyField& field, const Waterline& base, Label side, double target,
                                std::span<const ScoredSample> labeled) {
    if (!(target >= 0.0 && target <= 1.0)) throw DomainError("class target must lie in [0, 1]");
    const bool raise_pos = side == Label::positive;
    const bool empirical = !labeled.empty();
    const double p = field.prevalence;

    const DomainSums base_sums = sum_domains(field, base.rule());
    auto metric = [&](const DomainSums& s, double z_pos, double z_neg) {
        return empirical ? empirical_metric(labeled, z_pos, z_neg, side) : model_metric(s, side);
    };
    if (metric(base_sums, base.z_pos, base.z_neg) >= target) return base;

    const Ladder own(field, raise_pos);
    const double from = raise_pos ? base.z_pos : base.z_neg;
    Waterline wl = base;
    DomainSums sums = base_sums;
    bool met = false;
    for (double level : own.levels_above(from)) {
        DomainSums trial = base_sums;
        set_class(trial, raise_pos, own.kept(level));
        const double zp = raise_pos ? level : base.z_pos;
        const double zn = raise_pos ? base.z_neg : level;
        if (metric(trial, zp, zn) >= target) {
            wl.z_pos = zp;
            wl.z_neg = zn;
            sums = trial;
            met = true;
            break;
        }
    }
    if (!met)
        throw InfeasibleTarget(std::string(raise_pos ? "specificity" : "sensitivity") + " target " +
                               std::to_string(target) + " not reached even with the class waterline at 1");

    if (accuracy_of(sums, p) >= base.target_x - base.eps_x) return wl;

    // One alternation: raise the other class until accuracy is restored
    // without losing the class target.
    const Ladder other(field, !raise_pos);
    const double other_from = raise_pos ? wl.z_neg : wl.z_pos;
    for (double level : other.levels_above(other_from)) {
        DomainSums trial = sums;
        set_class(trial, !raise_pos, other.kept(level));
        const double zp = raise_pos ? wl.z_pos : level;
        const double zn = raise_pos ? level : wl.z_neg;
        if (accuracy_of(trial, p) >= base.target_x - base.eps_x && metric(trial, zp, zn) >= target) {
            wl.z_pos = zp;
            wl.z_neg = zn;
            return wl;
        }
    }
    wl.accuracy_violated = true;
    return wl;
}

Waterline raise_class_waterline(const ClassifierSetup& setup, const Waterline& base, Label side, double target,
                                std::span<const Sample> labeled) {
    const std::vector<ScoredSample> scored = score_samples(setup, labeled);
    if (!labeled.empty() && scored.empty()) throw DataError("no labeled samples to measure the class target on");
    return raise_class_waterline(setup.field(), base, side, target, scored);
}

}  // namespace holdout
