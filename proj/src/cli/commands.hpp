#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "holdout/model.hpp"
#include "holdout/quadrature.hpp"

namespace holdout::cli {

struct RunConfig {
    std::filesystem::path train;
    std::filesystem::path test;
    std::filesystem::path model;
    std::filesystem::path decisions;
    std::filesystem::path spec;
    std::filesystem::path out = "out";

    std::optional<double> prevalence;
    double target_x = 0.99;
    double eps_x = 1e-4;
    int max_iter = 40;
    int grid = 512;
    std::uint64_t seed = 0;
    int restarts = 8;

    std::optional<double> min_sensitivity;
    std::optional<double> min_specificity;
    bool empirical_constraints = false;  // measure the class targets on the training labels

    std::optional<double> x_cut;
    std::optional<double> y_cut;

    std::vector<double> levels = {0.9, 0.95, 0.99};

    std::size_t n_samples = 1000;
    double x_max_bits = 16.0;  // scale of simulated raw readouts

    QuadratureSpec quadrature() const { return {grid, grid}; }
    std::filesystem::path model_path() const { return model.empty() ? out / "model.json" : model; }
    std::filesystem::path decisions_path() const { return decisions.empty() ? out / "decisions.csv" : decisions; }
};

// Throws ConfigError on values outside their documented ranges.
void check_config(const RunConfig& cfg);

int cmd_fit(const RunConfig& cfg, std::ostream& out);
int cmd_waterline(const RunConfig& cfg, std::ostream& out);
int cmd_classify(const RunConfig& cfg, std::ostream& out);
int cmd_report(const RunConfig& cfg, std::ostream& out);
int cmd_grids(const RunConfig& cfg, std::ostream& out);
int cmd_validate(const RunConfig& cfg, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, std::ostream& out);

}  // namespace holdout::cli
