#include "momdens/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace momdens {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int k) {
    if (k < 2 || k > 64)
        throw InvalidInput("gauss_legendre: node count must be in [2, 64]");

    std::vector<double> x(k), w(k);
    const int half = (k + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-based initial guess for the i-th root of P_k.
        double t = std::cos(std::numbers::pi * (i + 0.75) / (k + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Legendre recurrence: evaluates P_k(t) and P_{k-1}(t).
            double p0 = 1.0, p1 = t;
            for (int j = 2; j <= k; ++j) {
                const double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = k * (t * p1 - p0) / (t * t - 1.0);
            const double step = p1 / dp;
            t -= step;
            if (std::abs(step) < 1e-15)
                break;
        }
        // One more recurrence pass at the converged root for the weight.
        double p0 = 1.0, p1 = t;
        for (int j = 2; j <= k; ++j) {
            const double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        dp = k * (t * p1 - p0) / (t * t - 1.0);

        x[i] = -t;
        x[k - 1 - i] = t;
        const double weight = 2.0 / ((1.0 - t * t) * dp * dp);
        w[i] = weight;
        w[k - 1 - i] = weight;
    }
    // Odd counts: pin the middle node exactly.
    if (k % 2 == 1)
        x[k / 2] = 0.0;
    return {x, w};
}

QuadratureGrid build_grid(double center, double half_width, int panels,
                          int nodes_per_panel) {
    if (!(half_width > 0.0))
        throw InvalidInput("build_grid: half_width must be positive");
    if (panels < 1)
        throw InvalidInput("build_grid: need at least one panel");
    if (nodes_per_panel < 2 || nodes_per_panel > 64)
        throw InvalidInput("build_grid: nodes_per_panel must be in [2, 64]");

    const auto [ref_nodes, ref_weights] = gauss_legendre(nodes_per_panel);

    QuadratureGrid grid;
    grid.center = center;
    grid.half_width = half_width;
    grid.panels = panels;
    grid.nodes_per_panel = nodes_per_panel;
    grid.nodes.reserve(static_cast<std::size_t>(panels) * nodes_per_panel);
    grid.weights.reserve(grid.nodes.capacity());

    const double lo = center - half_width;
    const double panel_width = 2.0 * half_width / panels;
    for (int p = 0; p < panels; ++p) {
        const double a = lo + p * panel_width;
        const double mid = a + 0.5 * panel_width;
        const double scale = 0.5 * panel_width;
        for (int i = 0; i < nodes_per_panel; ++i) {
            grid.nodes.push_back(mid + scale * ref_nodes[i]);
            grid.weights.push_back(scale * ref_weights[i]);
        }
    }
    return grid;
}

QuadratureGrid refine_grid(const QuadratureGrid& grid) {
    return build_grid(grid.center, grid.half_width, 2 * grid.panels,
                      grid.nodes_per_panel);
}

QuadratureGrid transform_grid(const QuadratureGrid& grid, double shift,
                              double scale) {
    if (!(scale > 0.0))
        throw InvalidInput("transform_grid: scale must be positive");
    QuadratureGrid out = grid;
    out.center = (grid.center - shift) / scale;
    out.half_width = grid.half_width / scale;
    for (auto& x : out.nodes)
        x = (x - shift) / scale;
    for (auto& w : out.weights)
        w /= scale;
    return out;
}

}  // namespace momdens
