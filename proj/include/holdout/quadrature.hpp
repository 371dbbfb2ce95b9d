#pragma once

#include <cstddef>

namespace holdout {

// Tensor-product grid on [0,1] x [0,1] plus n_y nodes on each of the lines
// x = 0 and x = 1. x uses the midpoint rule; y is integrated cell by cell.
struct QuadratureSpec {
    int n_x = 512;
    int n_y = 512;

    double hx() const { return 1.0 / n_x; }
    double hy() const { return 1.0 / n_y; }
    double x_node(int i) const { return (i + 0.5) / n_x; }
    double y_edge(int j) const { return static_cast<double>(j) / n_y; }
    double y_node(int j) const { return (j + 0.5) / n_y; }

    std::size_t interior_nodes() const { return static_cast<std::size_t>(n_x) * n_y; }
    std::size_t total_nodes() const { return interior_nodes() + 2 * static_cast<std::size_t>(n_y); }

    bool operator==(const QuadratureSpec&) const = default;
};

inline constexpr int kMinGridNodes = 64;

}  // namespace holdout
