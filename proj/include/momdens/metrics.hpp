#pragma once

#include <functional>
#include <vector>

#include "momdens/quadrature.hpp"

namespace momdens {

using DensityFn = std::function<double(double)>;

// Distribution function sampled at the quadrature nodes. Values are exact
// panel-prefix integrals (nested Gauss rule inside the current panel), so
// at() interpolates between genuinely correct CDF ordinates with a cubic
// Hermite using the density as the derivative.
struct CdfTable {
    std::vector<double> xs;       // domain edges + all interior nodes
    std::vector<double> values;   // F at xs, nondecreasing, clamped to [0,1]
    std::vector<double> density;  // f at xs
    std::vector<double> edge_xs;     // panel edges
    std::vector<double> edge_prefix; // exact mass left of each edge
    double total_mass = 0.0;      // integral of f over the grid, pre-clamp

    double at(double x) const;

    // Exact CDF at x (panel prefix plus a nested Gauss integral); needs the
    // density the table was built from.
    double exact_at(const std::function<double(double)>& density_fn,
                    double x) const;
};

CdfTable cdf(const DensityFn& density, const QuadratureGrid& grid);

// sup_x |F_p(x) - F_q(x)|: a Kolmogorov-type sup-CDF distance (the metric
// used throughout the experiment reports; not the 1/2 L1 total variation).
// The node-wise maximum is polished by a local continuous search so the sup
// is located between nodes as well.
double tv_distance(const DensityFn& p, const DensityFn& q,
                   const QuadratureGrid& grid);

// integral p log(p/q); 0 log 0 := 0. Throws SupportMismatch when q
// underflows (< 1e-300) at a node where p is non-negligible.
double kl_divergence(const DensityFn& p, const DensityFn& q,
                     const QuadratureGrid& grid);

// integral (sqrt(p) - sqrt(q))^2; symmetric, in [0, 2].
double hellinger_sq(const DensityFn& p, const DensityFn& q,
                    const QuadratureGrid& grid);

// integral (p - q)^2.
double l2_distance(const DensityFn& p, const DensityFn& q,
                   const QuadratureGrid& grid);

}  // namespace momdens
