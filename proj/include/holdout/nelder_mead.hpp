#pragma once

#include <functional>
#include <vector>

namespace holdout {

struct SimplexOptions {
    double initial_step = 0.1;   // relative edge length of the starting simplex
    double f_tolerance = 1e-10;  // relative spread of vertex values
    double x_tolerance = 1e-8;   // simplex diameter
    int max_evaluations = 20000;
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

// Nelder-Mead downhill simplex with the standard coefficients
// (reflection 1, expansion 2, contraction 1/2, shrink 1/2). Non-finite
// objective values are treated as +inf so the simplex retreats from them.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          std::vector<double> start, const SimplexOptions& options = {});

}  // namespace holdout
