#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <fstream>
#include <ostream>
#include <sstream>

#include "holdout/classify.hpp"
#include "holdout/cli.hpp"
#include "holdout/io.hpp"
#include "holdout/metrics.hpp"
#include "holdout/simulate.hpp"
#include "holdout/transform.hpp"
#include "holdout/validate.hpp"

namespace holdout::cli {

namespace {

std::string fixed(double v, int digits = 6) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string g17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void require(const std::filesystem::path& p, const char* flag, const char* command) {
    if (p.empty()) throw ConfigError(std::string(command) + " needs " + flag);
}

std::vector<Sample> load_samples(const std::filesystem::path& path, const ScaleRecord& scale) {
    const auto readings = io::read_raw_csv(path);
    return to_samples(readings, scale);
}

double prevalence_for(const RunConfig& cfg, const io::ModelFile& f) {
    const double p = cfg.prevalence.value_or(f.prevalence.value_or(0.5));
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("prevalence must lie strictly between 0 and 1");
    return p;
}

const Waterline& require_waterline(const io::ModelFile& f) {
    if (!f.waterline) throw DataError("model file has no waterline; run the waterline command first");
    return *f.waterline;
}

void print_params(std::ostream& out, const char* name, const DensityModel& m) {
    const DensityParams& p = m.params();
    out << name << ": mu=" << fixed(p.mu) << " sigma=" << fixed(p.sigma) << " theta=" << fixed(p.theta)
        << " alpha=(" << fixed(p.alpha1) << ", " << fixed(p.alpha2) << ", " << fixed(p.alpha3) << ", "
        << fixed(p.alpha4) << ")\n";
    if (const auto& d = m.diagnostics())
        out << "  nll=" << fixed(d->nll) << " evaluations=" << d->evaluations << " restarts=" << d->restarts
            << " converged=" << (d->converged ? "yes" : "no") << '\n';
}

void print_waterline(std::ostream& out, const Waterline& wl, const ModelMetrics& m) {
    if (wl.unconstrained)
        out << "unconstrained: target " << fixed(wl.target_x, 4) << " is met without hold-outs, z0 = 0.5\n";
    out << "z0 = " << fixed(wl.z0, 9) << "  z_pos = " << fixed(wl.z_pos, 9) << "  z_neg = " << fixed(wl.z_neg, 9)
        << '\n';
    out << "iterations = " << wl.iterations << "  converged = " << (wl.converged ? "yes" : "no") << '\n';
    if (wl.c_set_detected)
        out << "level set with finite mass at z0: kept fraction " << fixed(wl.c_keep_fraction) << '\n';
    if (wl.accuracy_violated) out << "warning: accuracy constraint could not be restored after the class target\n";
    out << "hold-out mass = " << fixed(m.holdout_mass) << '\n';
    out << "achieved accuracy = " << fixed(m.achieved_accuracy) << '\n';
    out << "sensitivity = " << fixed(m.sensitivity) << "  specificity = " << fixed(m.specificity) << '\n';
}

void write_csv(const std::filesystem::path& path, const std::string& header,
               const std::function<void(std::ostream&)>& body) {
    std::ostringstream ss;
    ss << header << '\n';
    body(ss);
    io::write_file(path, ss.str());
}

}  // namespace

void check_config(const RunConfig& cfg) {
    if (cfg.prevalence && !(*cfg.prevalence > 0.0 && *cfg.prevalence < 1.0))
        throw ConfigError("--prevalence must lie strictly between 0 and 1");
    if (!(cfg.target_x > 0.5 && cfg.target_x < 1.0)) throw ConfigError("--target-x must lie strictly between 0.5 and 1");
    if (!(cfg.eps_x >= 0.0)) throw ConfigError("--eps-x must be nonnegative");
    if (cfg.max_iter < 1) throw ConfigError("--max-iter must be at least 1");
    if (cfg.grid < kMinGridNodes) throw ConfigError("--grid must be at least " + std::to_string(kMinGridNodes));
    if (cfg.restarts < 1) throw ConfigError("--restarts must be at least 1");
    for (const auto& t : {cfg.min_sensitivity, cfg.min_specificity})
        if (t && !(*t >= 0.0 && *t <= 1.0)) throw ConfigError("class targets must lie in [0, 1]");
    if (cfg.x_cut.has_value() != cfg.y_cut.has_value()) throw ConfigError("--x-cut and --y-cut go together");
    for (double l : cfg.levels)
        if (!(l > 0.5 && l < 1.0)) throw ConfigError("--levels entries must lie strictly between 0.5 and 1");
    if (cfg.n_samples < 1) throw ConfigError("--n-samples must be at least 1");
    if (!(cfg.x_max_bits > 0.0)) throw ConfigError("--x-max-bits must be positive");
}

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
    require(cfg.train, "--train", "fit");
    const auto readings = io::read_raw_csv(cfg.train);
    if (readings.empty()) throw DataError("training file has no rows");
    const ScaleRecord scale = learn_scale(readings);
    TransformStats stats;
    const auto samples = to_samples(readings, scale, &stats);

    std::vector<Sample> pos, neg;
    for (const auto& s : samples) {
        if (!s.label) continue;
        (*s.label == Label::positive ? pos : neg).push_back(s);
    }
    if (pos.empty()) throw DataError("training data contains no positive samples");
    if (neg.empty()) throw DataError("training data contains no negative samples");

    FitOptions options;
    options.seed = cfg.seed;
    options.restarts = cfg.restarts;
    options.grid = cfg.quadrature();

    io::ModelFile f;
    f.positive = fit(pos, options);
    f.negative = fit(neg, options);
    f.positive.set_scale(scale);
    f.negative.set_scale(scale);
    f.prevalence = cfg.prevalence.value_or(static_cast<double>(pos.size()) / static_cast<double>(pos.size() + neg.size()));
    io::save_model(cfg.model_path(), f);

    out << "samples: " << pos.size() << " positive, " << neg.size() << " negative; censored x: "
        << stats.x_lower_censored << " lower, " << stats.x_upper_censored << " upper\n";
    print_params(out, "positive", f.positive);
    print_params(out, "negative", f.negative);
    out << "prevalence = " << fixed(*f.prevalence) << '\n';
    out << "model written to " << cfg.model_path().string() << '\n';
    return kOk;
}

int cmd_waterline(const RunConfig& cfg, std::ostream& out) {
    io::ModelFile f = io::load_model(cfg.model_path());
    const double p = prevalence_for(cfg, f);
    const ClassifierSetup setup(f.positive, f.negative, p, cfg.quadrature());
    Waterline wl = solve_waterline(setup, cfg.target_x, cfg.eps_x, cfg.max_iter);

    std::vector<Sample> labeled;
    if (cfg.empirical_constraints && (cfg.min_specificity || cfg.min_sensitivity)) {
        require(cfg.train, "--train", "waterline with --empirical");
        labeled = load_samples(cfg.train, f.positive.scale());
    }
    if (cfg.min_specificity) wl = raise_class_waterline(setup, wl, Label::positive, *cfg.min_specificity, labeled);
    if (cfg.min_sensitivity) wl = raise_class_waterline(setup, wl, Label::negative, *cfg.min_sensitivity, labeled);

    f.positive = setup.positive();
    f.negative = setup.negative();
    f.prevalence = p;
    f.waterline = wl;
    io::save_model(cfg.model_path(), f);
    print_waterline(out, wl, model_metrics(setup, wl));
    return kOk;
}

int cmd_classify(const RunConfig& cfg, std::ostream& out) {
    require(cfg.test, "--test", "classify");
    const io::ModelFile f = io::load_model(cfg.model_path());
    const Waterline& wl = require_waterline(f);
    const double p = f.prevalence.value_or(0.5);
    const auto samples = load_samples(cfg.test, f.positive.scale());

    std::vector<io::DecisionRow> rows;
    rows.reserve(samples.size());
    std::size_t counts[3] = {0, 0, 0};
    for (const auto& s : samples) {
        const double pd = f.positive.at(s), nd = f.negative.at(s);
        ClassDecision d;
        try {
            d = classify(local_accuracy(p, pd, nd), region_of(s.x_censor), wl);
        } catch (const UnsupportedPoint&) {
            d.region = region_of(s.x_censor);  // no support under either model: held out
        }
        ++counts[static_cast<int>(d.klass)];
        rows.push_back({s.x, s.y, d, s.label});
    }
    std::ostringstream ss;
    io::write_decisions_csv(ss, rows);
    const auto path = cfg.out / "decisions.csv";
    io::write_file(path, ss.str());
    out << "classified " << samples.size() << " samples: " << counts[0] << " pos, " << counts[1] << " neg, "
        << counts[2] << " indeterminate\n";
    out << "decisions written to " << path.string() << '\n';
    return kOk;
}

int cmd_report(const RunConfig& cfg, std::ostream& out) {
    const auto rows = io::read_decisions_csv(cfg.decisions_path());
    std::vector<std::pair<ClassDecision, Label>> labeled;
    std::vector<Sample> samples;
    std::vector<ClassDecision> decisions;
    for (const auto& r : rows) {
        if (!r.label) continue;
        labeled.emplace_back(r.decision, *r.label);
        const Censor c = r.decision.region == Region::left_boundary    ? Censor::at_lower_bound
                         : r.decision.region == Region::right_boundary ? Censor::at_upper_bound
                                                                       : Censor::interior;
        samples.push_back({r.x, r.y, c, r.label});
        decisions.push_back(r.decision);
    }
    if (labeled.empty()) throw DataError("decisions file has no labeled rows");
    const EmpiricalMetrics empirical = empirical_metrics(labeled);

    std::optional<ModelMetrics> model;
    if (!cfg.model.empty()) {
        const io::ModelFile f = io::load_model(cfg.model);
        const Waterline& wl = require_waterline(f);
        const ClassifierSetup setup(f.positive, f.negative, f.prevalence.value_or(0.5), f.positive.grid());
        model = model_metrics(setup, wl);
    }
    std::optional<Comparison> comparison;
    if (cfg.x_cut && cfg.y_cut) comparison = compare_rectilinear(samples, {*cfg.x_cut, *cfg.y_cut}, decisions);

    const std::string table = io::report_table(empirical, comparison);
    io::write_file(cfg.out / "report.json", io::report_to_json(model, empirical, comparison));
    io::write_file(cfg.out / "report.txt", table);
    out << table;
    return kOk;
}

int cmd_grids(const RunConfig& cfg, std::ostream& out) {
    const io::ModelFile f = io::load_model(cfg.model_path());
    const double p = prevalence_for(cfg, f);
    const ClassifierSetup setup(f.positive, f.negative, p, cfg.quadrature());
    const AccuracyField& field = setup.field();

    auto domain = [&](std::size_t i) -> std::string_view {
        const Label binary = field.positive[i] ? Label::positive : Label::negative;
        if (!f.waterline) return binary == Label::positive ? "pos" : "neg";
        return to_string(classify(AccuracyAtPoint{field.z[i], binary}, field.region[i], *f.waterline).klass);
    };
    const std::size_t interior_end = field.grid.interior_nodes();

    write_csv(cfg.out / "zstar_grid.csv", "x,y,z_star", [&](std::ostream& s) {
        for (std::size_t i = 0; i < interior_end; ++i) s << field.x[i] << ',' << field.y[i] << ',' << g17(field.z[i]) << '\n';
    });
    write_csv(cfg.out / "domain_grid.csv", "x,y,domain", [&](std::ostream& s) {
        for (std::size_t i = 0; i < interior_end; ++i) s << field.x[i] << ',' << field.y[i] << ',' << domain(i) << '\n';
    });
    for (const auto& [region, name] : {std::pair{Region::left_boundary, "left"}, std::pair{Region::right_boundary, "right"}}) {
        const std::size_t row = field.rows() - (region == Region::left_boundary ? 2 : 1);
        write_csv(cfg.out / (std::string("zstar_") + name + ".csv"), "y,z_star", [&](std::ostream& s) {
            for (std::size_t i = field.row_begin[row]; i < field.row_begin[row + 1]; ++i)
                s << field.y[i] << ',' << g17(field.z[i]) << '\n';
        });
        write_csv(cfg.out / (std::string("domain_") + name + ".csv"), "y,domain", [&](std::ostream& s) {
            for (std::size_t i = field.row_begin[row]; i < field.row_begin[row + 1]; ++i)
                s << field.y[i] << ',' << domain(i) << '\n';
        });
    }
    write_csv(cfg.out / "contours.csv", "target_x,z0,holdout_mass,status", [&](std::ostream& s) {
        for (double level : cfg.levels) {
            try {
                const Waterline wl = solve_waterline(field, level, cfg.eps_x, cfg.max_iter);
                s << level << ',' << g17(wl.z0) << ',' << g17(model_metrics(field, wl).holdout_mass) << ','
                  << (wl.unconstrained ? "unconstrained" : "solved") << '\n';
            } catch (const InfeasibleTarget&) {
                s << level << ",,,infeasible\n";
            }
        }
    });
    out << "grids written to " << cfg.out.string() << " (" << field.size() << " nodes, min Z* = "
        << fixed(*std::min_element(field.z.begin(), field.z.end())) << ")\n";
    return kOk;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
    const io::ModelFile f = io::load_model(cfg.model_path());
    const Waterline& wl = require_waterline(f);
    const ClassifierSetup setup(f.positive, f.negative, f.prevalence.value_or(0.5), f.positive.grid());
    const AccuracyField& field = setup.field();

    const Certificate cert = certify(field, wl);
    const ClassSwapReport swaps = class_swap_check(field, wl);
    std::ostringstream ss;
    io::write_certificate_csv(ss, field, wl, cert);
    io::write_file(cfg.out / "certificate.csv", ss.str());

    out << "certificate: " << (cert.passed ? "passed" : "FAILED") << (cert.vacuous ? " (vacuous)" : "")
        << "  eps_grid = " << g17(cert.eps_grid) << '\n';
    if (!cert.vacuous) out << "min log set-partial = " << g17(cert.min_log_set_partial) << '\n';
    out << "class swaps: " << (swaps.passed() ? "passed" : "FAILED") << '\n';
    if (!wl.unconstrained) {
        try {
            const GreedyResult g = greedy_oracle(field, wl.target_x);
            out << "greedy oracle hold-out mass = " << fixed(g.holdout_mass) << "  solver = "
                << fixed(model_metrics(field, wl).holdout_mass) << '\n';
        } catch (const InfeasibleTarget&) {
            out << "greedy oracle: target infeasible\n";
        }
    }
    if (cert.passed && swaps.passed()) return kOk;

    const std::size_t shown = std::min<std::size_t>(cert.violations.size(), 20);
    for (std::size_t k = 0; k < shown; ++k) {
        const std::size_t i = cert.violations[k].node;
        out << "  violation at x=" << field.x[i] << " y=" << field.y[i] << " (" << to_string(field.region[i])
            << ") Z*=" << g17(field.z[i]) << " log set-partial=" << g17(cert.violations[k].log_set_partial) << '\n';
    }
    if (cert.violations.size() > shown) out << "  ... " << cert.violations.size() - shown << " more\n";
    for (std::size_t i : swaps.violations) out << "  minority class assigned at node " << i << '\n';
    return kCertificateFailed;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    SimSpec spec;
    if (!cfg.spec.empty()) {
        spec = io::sim_spec_from_json(io::read_file(cfg.spec));
    } else {
        spec.pos_params = default_positive_params();
        spec.neg_params = default_negative_params();
    }
    if (cfg.prevalence) spec.prevalence = *cfg.prevalence;
    spec.seed = cfg.seed;
    if (cfg.spec.empty()) spec.n_samples = cfg.n_samples;

    const ScaleRecord scale{cfg.x_max_bits, 7.0};
    const auto samples = sample_population(spec);
    std::vector<RawReading> raw;
    raw.reserve(samples.size());
    for (const auto& s : samples) raw.push_back(to_raw(s, scale));

    std::ostringstream ss;
    io::write_raw_csv(ss, raw);
    io::write_file(cfg.out / "simulated.csv", ss.str());
    io::write_file(cfg.out / "simulated_spec.json", io::sim_spec_to_json(spec, scale));
    std::size_t positives = 0;
    for (const auto& s : samples) positives += s.label == Label::positive;
    out << "simulated " << samples.size() << " samples (" << positives << " positive) to "
        << (cfg.out / "simulated.csv").string() << '\n';
    return kOk;
}

}  // namespace holdout::cli
