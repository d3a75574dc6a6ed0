#include "momdens/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace momdens {

namespace {

constexpr double kUnderflow = 1e-300;

double checked(const DensityFn& f, double x) {
    const double v = f(x);
    if (!std::isfinite(v))
        throw NonFiniteValue("density not finite at " + std::to_string(x));
    if (v < 0.0)
        throw InvalidInput("density negative at " + std::to_string(x));
    return v;
}

}  // namespace

double CdfTable::at(double x) const {
    if (x <= xs.front())
        return values.front();
    if (x >= xs.back())
        return values.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const auto i = static_cast<std::size_t>(it - xs.begin()) - 1;

    const double h = xs[i + 1] - xs[i];
    const double t = (x - xs[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    // Cubic Hermite with F' = f at both ends.
    const double v = (2 * t3 - 3 * t2 + 1) * values[i] +
                     (t3 - 2 * t2 + t) * h * density[i] +
                     (-2 * t3 + 3 * t2) * values[i + 1] +
                     (t3 - t2) * h * density[i + 1];
    return std::clamp(v, values[i], values[i + 1]);
}

CdfTable cdf(const DensityFn& density, const QuadratureGrid& grid) {
    const auto [sub_nodes, sub_weights] = gauss_legendre(12);

    CdfTable table;
    const std::size_t n = grid.nodes.size();
    table.xs.reserve(n + 2);
    table.values.reserve(n + 2);
    table.density.reserve(n + 2);

    const double lo = grid.center - grid.half_width;
    const double panel_width = 2.0 * grid.half_width / grid.panels;

    table.xs.push_back(lo);
    table.values.push_back(0.0);
    table.density.push_back(checked(density, lo));

    double prefix = 0.0;  // mass of all complete panels so far
    table.edge_xs.push_back(lo);
    table.edge_prefix.push_back(0.0);
    for (int p = 0; p < grid.panels; ++p) {
        const double a = lo + p * panel_width;
        double panel_sum = 0.0;
        for (int i = 0; i < grid.nodes_per_panel; ++i) {
            const std::size_t idx =
                static_cast<std::size_t>(p) * grid.nodes_per_panel + i;
            const double node = grid.nodes[idx];
            panel_sum += grid.weights[idx] * checked(density, node);

            // F(node) = prefix + integral over [a, node].
            double partial = 0.0;
            const double mid = 0.5 * (a + node);
            const double scale = 0.5 * (node - a);
            for (std::size_t j = 0; j < sub_nodes.size(); ++j)
                partial += scale * sub_weights[j] *
                           checked(density, mid + scale * sub_nodes[j]);

            table.xs.push_back(node);
            table.values.push_back(prefix + partial);
            table.density.push_back(checked(density, node));
        }
        prefix += panel_sum;
        table.edge_xs.push_back(a + panel_width);
        table.edge_prefix.push_back(prefix);
    }

    table.xs.push_back(grid.center + grid.half_width);
    table.values.push_back(prefix);
    table.density.push_back(checked(density, table.xs.back()));
    table.total_mass = prefix;

    // Clamp to [0,1] and repair any quadrature-noise inversions.
    double prev = 0.0;
    for (auto& v : table.values) {
        v = std::clamp(v, 0.0, 1.0);
        v = std::max(v, prev);
        prev = v;
    }
    return table;
}

double CdfTable::exact_at(const std::function<double(double)>& density_fn,
                          double x) const {
    if (x <= edge_xs.front())
        return edge_prefix.front();
    if (x >= edge_xs.back())
        return edge_prefix.back();
    const auto it = std::upper_bound(edge_xs.begin(), edge_xs.end(), x);
    const auto j = static_cast<std::size_t>(it - edge_xs.begin()) - 1;

    static const auto rule = gauss_legendre(12);
    const double mid = 0.5 * (edge_xs[j] + x);
    const double scale = 0.5 * (x - edge_xs[j]);
    double partial = 0.0;
    for (std::size_t i = 0; i < rule.first.size(); ++i)
        partial += scale * rule.second[i] *
                   density_fn(mid + scale * rule.first[i]);
    return edge_prefix[j] + partial;
}

double tv_distance(const DensityFn& p, const DensityFn& q,
                   const QuadratureGrid& grid) {
    const CdfTable fp = cdf(p, grid);
    const CdfTable fq = cdf(q, grid);

    std::size_t best = 0;
    double coarse = 0.0;
    for (std::size_t i = 0; i < fp.xs.size(); ++i) {
        const double d = std::abs(fp.values[i] - fq.values[i]);
        if (d > coarse) {
            coarse = d;
            best = i;
        }
    }

    // Polish between nodes around the coarse argmax, with exact local CDF
    // evaluations so the result does not inherit interpolation noise.
    const auto gap = [&](double x) {
        return std::abs(fp.exact_at(p, x) - fq.exact_at(q, x));
    };
    double a = fp.xs[best == 0 ? 0 : best - 1];
    double b = fp.xs[std::min(best + 1, fp.xs.size() - 1)];
    for (int iter = 0; iter < 120; ++iter) {
        const double m1 = a + (b - a) / 3.0;
        const double m2 = b - (b - a) / 3.0;
        if (gap(m1) < gap(m2))
            a = m1;
        else
            b = m2;
    }
    return std::clamp(std::max(coarse, gap(0.5 * (a + b))), 0.0, 1.0);
}

double kl_divergence(const DensityFn& p, const DensityFn& q,
                     const QuadratureGrid& grid) {
    return integrate(
        [&](double x) {
            const double px = checked(p, x);
            if (px <= kUnderflow)
                return 0.0;
            const double qx = checked(q, x);
            if (qx < kUnderflow)
                throw SupportMismatch(
                    "q underflows where p is non-negligible (x = " +
                    std::to_string(x) + ")");
            return px * std::log(px / qx);
        },
        grid);
}

double hellinger_sq(const DensityFn& p, const DensityFn& q,
                    const QuadratureGrid& grid) {
    return integrate(
        [&](double x) {
            const double d = std::sqrt(checked(p, x)) - std::sqrt(checked(q, x));
            return d * d;
        },
        grid);
}

double l2_distance(const DensityFn& p, const DensityFn& q,
                   const QuadratureGrid& grid) {
    return integrate(
        [&](double x) {
            const double d = checked(p, x) - checked(q, x);
            return d * d;
        },
        grid);
}

}  // namespace momdens
