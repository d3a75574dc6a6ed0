#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "momdens/errors.hpp"

namespace momdens {

// Composite Gauss-Legendre rule on [center - half_width, center + half_width]:
// `panels` equal subintervals with `nodes_per_panel` Gauss points each.
// Nodes are strictly increasing, weights strictly positive, and the rule is
// exact for polynomials of degree <= 2*nodes_per_panel - 1 on each panel.
struct QuadratureGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
    double center = 0.0;
    double half_width = 0.0;
    int panels = 0;
    int nodes_per_panel = 0;
};

// Gauss-Legendre nodes/weights on [-1, 1], computed by Newton iteration on
// the Legendre recurrence. k in [2, 64].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int k);

QuadratureGrid build_grid(double center, double half_width, int panels,
                          int nodes_per_panel);

// Same rule with twice the panels; used for resolution self-checks.
QuadratureGrid refine_grid(const QuadratureGrid& grid);

// Affine image of a grid under x -> (x - shift) / scale.
QuadratureGrid transform_grid(const QuadratureGrid& grid, double shift,
                              double scale);

template <class F>
double integrate(F&& f, const QuadratureGrid& grid) {
    double sum = 0.0;
    double carry = 0.0;  // Kahan
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
        const double v = f(grid.nodes[i]);
        if (!std::isfinite(v))
            throw NonFiniteValue("integrand not finite at node " +
                                 std::to_string(grid.nodes[i]));
        const double term = grid.weights[i] * v - carry;
        const double next = sum + term;
        carry = (next - sum) - term;
        sum = next;
    }
    return sum;
}

}  // namespace momdens
