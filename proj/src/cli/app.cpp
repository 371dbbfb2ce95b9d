#include <algorithm>
#include <ostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "holdout/cli.hpp"
#include "holdout/error.hpp"
#include "holdout/model.hpp"

namespace holdout::cli {

namespace {

struct Command {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&, std::ostream&);
};

constexpr Command kCommands[] = {
    {"fit", "fit both class models to labeled training data", cmd_fit},
    {"waterline", "solve the hold-out waterline for --target-x", cmd_waterline},
    {"classify", "classify a test file with a solved model", cmd_classify},
    {"report", "empirical metrics from labeled decisions", cmd_report},
    {"grids", "plot data: local accuracy, domains, contour levels", cmd_grids},
    {"validate", "bathtub certificate for the solved waterline", cmd_validate},
    {"simulate", "draw a synthetic labeled data set", cmd_simulate},
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Minimum hold-out classification for two-class assay data", "holdout"};
    app.set_config("--config", "", "INI/TOML file with option defaults; flags override it");
    app.fallthrough();
    app.require_subcommand(1);

    RunConfig cfg;
    std::string train, test, model, decisions, spec, outdir = "out";
    std::optional<double> prevalence, min_sens, min_spec, x_cut, y_cut;
    app.add_option("--train", train, "labeled training CSV (total_igg,sars_igg_sum,label)");
    app.add_option("--test", test, "CSV to classify");
    app.add_option("--model", model, "model file (default OUT/model.json)");
    app.add_option("--decisions", decisions, "decisions CSV for report (default OUT/decisions.csv)");
    app.add_option("--spec", spec, "simulation spec JSON");
    app.add_option("--out", outdir, "output directory")->capture_default_str();
    app.add_option("--prevalence", prevalence, "prevalence p");
    app.add_option("--target-x", cfg.target_x, "target accuracy X")->capture_default_str();
    app.add_option("--eps-x", cfg.eps_x, "bisection tolerance on the constraint integral")->capture_default_str();
    app.add_option("--max-iter", cfg.max_iter, "bisection iterations")->capture_default_str();
    app.add_option("--grid", cfg.grid, "quadrature nodes per axis")->capture_default_str();
    app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    app.add_option("--restarts", cfg.restarts, "fit multistarts")->capture_default_str();
    app.add_option("--min-sensitivity", min_sens, "raise the negative-class waterline to this sensitivity");
    app.add_option("--min-specificity", min_spec, "raise the positive-class waterline to this specificity");
    app.add_flag("--empirical", cfg.empirical_constraints, "measure class targets on the --train labels");
    app.add_option("--x-cut", x_cut, "rectilinear cutoff in x (working coordinates)");
    app.add_option("--y-cut", y_cut, "rectilinear cutoff in y (working coordinates)");
    app.add_option("--levels", cfg.levels, "accuracies for the contour list")->delimiter(',')->capture_default_str();
    app.add_option("--n-samples", cfg.n_samples, "simulated sample count")->capture_default_str();
    app.add_option("--x-max-bits", cfg.x_max_bits, "x scale of simulated raw readouts")->capture_default_str();

    for (const auto& c : kCommands) app.add_subcommand(c.name, c.help);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }

    cfg.train = train;
    cfg.test = test;
    cfg.model = model;
    cfg.decisions = decisions;
    cfg.spec = spec;
    cfg.out = outdir;
    cfg.prevalence = prevalence;
    cfg.min_sensitivity = min_sens;
    cfg.min_specificity = min_spec;
    cfg.x_cut = x_cut;
    cfg.y_cut = y_cut;

    try {
        check_config(cfg);
        for (const auto& c : kCommands)
            if (app.got_subcommand(c.name)) return c.run(cfg, out);
        return kConfigError;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const InfeasibleTarget& e) {
        err << "infeasible target: " << e.what() << '\n';
        return kInfeasible;
    } catch (const FitError& e) {
        err << "fit failed: " << e.what() << '\n';
        return kDataError;
    } catch (const Error& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        err << "I/O error: " << e.what() << '\n';
        return kDataError;
    }
}

}  // namespace holdout::cli
