#include "momdens/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <Eigen/Dense>

#include "dual_newton.hpp"
#include "momdens/polynomial.hpp"

namespace momdens {

namespace {

// Exponent cap: iterates with exp(-poly) above e^60 anywhere on the grid are
// rejected by the line search before they can overflow the integrals.
constexpr double kMaxExponent = 60.0;

// Discretized maxent potential in the shared dual-Newton engine's table
// shape. The basis equals the caller's, so basis_map is the identity.
struct MaxEntTable {
    Eigen::ArrayXd tnode, w;
    int order;
    std::vector<double> tmu;
    Eigen::MatrixXd basis_map;
    std::vector<double> start;

    MaxEntTable(const QuadratureGrid& grid, const MomentSequence& moments,
                std::vector<double> initial_coeffs)
        : order(moments.order),
          tmu(moments.values),
          start(std::move(initial_coeffs)) {
        const auto n = static_cast<Eigen::Index>(grid.nodes.size());
        tnode.resize(n);
        w.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            tnode[i] = grid.nodes[i];
            w[i] = grid.weights[i];
        }
        basis_map = Eigen::MatrixXd::Identity(order + 1, order + 1);
    }

    double exponent_at(std::span<const double> m, Eigen::Index i) const {
        double v = 0.0;
        for (int k = order; k >= 0; --k)
            v = v * tnode[i] + m[k];
        return -v;
    }

    std::vector<double> initial() const { return start; }

    std::vector<double> r_moments() const {
        std::vector<long double> acc(order + 1, 0.0L);
        for (Eigen::Index i = 0; i < tnode.size(); ++i) {
            long double power = w[i] * std::exp(exponent_at(start, i));
            for (int k = 0; k <= order; ++k) {
                acc[k] += power;
                power *= tnode[i];
            }
        }
        return std::vector<double>(acc.begin(), acc.end());
    }

    // During iteration only the exponent cap matters: the grid bounds the
    // integrals, and a leading-sign screen would veto whole Newton
    // directions (the sign of a scaled step never changes). Integrability
    // on the line is validated on the converged coefficients instead.
    bool interior(std::span<const double> m, double) const {
        for (Eigen::Index i = 0; i < tnode.size(); ++i)
            if (exponent_at(m, i) > kMaxExponent)
                return false;
        return true;
    }

    double objective(std::span<const double> m,
                     std::span<const double> mu) const {
        long double linear = 0.0L;
        for (int k = 0; k <= order; ++k)
            linear += static_cast<long double>(m[k]) * mu[k];
        long double sum = 0.0L;
        for (Eigen::Index i = 0; i < tnode.size(); ++i)
            sum += static_cast<long double>(w[i]) * std::exp(exponent_at(m, i));
        return static_cast<double>(linear + sum);
    }

    Eigen::VectorXd gradient(std::span<const double> m,
                             std::span<const double> mu) const {
        std::vector<long double> acc(order + 1, 0.0L);
        for (Eigen::Index i = 0; i < tnode.size(); ++i) {
            long double power = w[i] * std::exp(exponent_at(m, i));
            for (int k = 0; k <= order; ++k) {
                acc[k] += power;
                power *= tnode[i];
            }
        }
        Eigen::VectorXd g(order + 1);
        for (int k = 0; k <= order; ++k)
            g[k] = static_cast<double>(static_cast<long double>(mu[k]) - acc[k]);
        return g;
    }

    Eigen::MatrixXd hessian(std::span<const double> m) const {
        std::vector<long double> s(2 * order + 1, 0.0L);
        for (Eigen::Index i = 0; i < tnode.size(); ++i) {
            long double power = w[i] * std::exp(exponent_at(m, i));
            for (int k = 0; k <= 2 * order; ++k) {
                s[k] += power;
                power *= tnode[i];
            }
        }
        Eigen::MatrixXd h(order + 1, order + 1);
        for (int k = 0; k <= order; ++k)
            for (int l = 0; l <= order; ++l)
                h(k, l) = static_cast<double>(s[k + l]);
        return h;
    }
};

// Coefficients of the Gaussian with the sequence's mean and variance; always
// a valid starting point and exact for order 2.
std::vector<double> gaussian_start(const MomentSequence& moments) {
    const double mean = moments.values[1];
    const double var = moments.values[2] - mean * mean;
    if (!(var > 0.0))
        throw DegenerateSamples("moment sequence has nonpositive variance");
    std::vector<double> m(moments.order + 1, 0.0);
    m[0] = 0.5 * std::log(2.0 * std::numbers::pi * var) +
           mean * mean / (2.0 * var);
    m[1] = -mean / var;
    m[2] = 0.5 / var;
    return m;
}

MaxEntDensity fit_maxent_direct(const MomentSequence& moments,
                                const QuadratureGrid& grid,
                                const MaxEntOptions& opts) {
    const int order = moments.order;
    const int dim = order + 1;
    std::vector<double> start = gaussian_start(moments);

    const MaxEntTable table(grid, moments, start);
    if (!table.interior(start, 0.0))
        throw NonIntegrable("starting exponent is not integrable on the grid");

    // exp(-poly) concentrates within a few standard deviations of the data,
    // so the homotopy core can be narrow.
    const double mean = moments.values[1];
    const double sd = std::sqrt(moments.values[2] - mean * mean);
    const double core_hw = std::min(8.0 * sd, grid.half_width);
    const QuadratureGrid core_grid =
        build_grid(mean, core_hw, grid.panels, grid.nodes_per_panel);
    const MaxEntTable core(core_grid, moments, start);

    SolveOptions engine_opts;
    engine_opts.max_iter = opts.max_iter;
    engine_opts.tol_grad = opts.tol_grad;
    engine_opts.tol_mom = opts.tol_mom;

    detail::NewtonState state = detail::minimize_dual(table, core, engine_opts);

    if (!state.converged && opts.throw_on_nonconvergence)
        throw NotConverged("maxent Newton did not converge",
                           state.iterations_total,
                           state.gradient_x.lpNorm<Eigen::Infinity>());

    // Trailing coefficients at solver-noise level are zeroed: when a lower
    // order already matches the moments, the top coefficients converge to
    // noise whose sign is meaningless. The line-integrable family then
    // needs the highest surviving coefficient at an even power with
    // positive sign; moment vectors admitting only truncated-domain fits
    // (heavy tails) are refused.
    if (state.converged) {
        double mag = 0.0;
        for (double v : state.bt)
            mag = std::max(mag, std::abs(v));
        const double noise = 1e-8 * std::max(1.0, mag);
        int lead = -1;
        for (int k = order; k >= 0; --k) {
            if (std::abs(state.bt[k]) > noise) {
                lead = k;
                break;
            }
            state.bt[k] = 0.0;
        }
        if (lead < 2 || lead % 2 != 0 || !(state.bt[lead] > 0.0)) {
            std::string msg =
                "maxent solution is not integrable on the real line (";
            for (int k = 0; k < dim; ++k)
                msg += (k ? " " : "") + std::to_string(state.bt[k]);
            throw NonIntegrable(msg + ")");
        }
        state.gradient_x = table.gradient(state.bt, moments.values);
    }

    MaxEntDensity density;
    density.order = order;
    density.coefficients = std::move(state.bt);
    density.iterations = state.iterations_total;
    density.moment_residuals.resize(dim);
    for (int k = 0; k < dim; ++k)
        density.moment_residuals[k] = -state.gradient_x[k];
    return density;
}

}  // namespace

MaxEntDensity fit_maxent(const MomentSequence& moments,
                         const QuadratureGrid& grid, const MaxEntOptions& opts) {
    require_positive_definite(moments);
    if (!opts.standardize)
        return fit_maxent_direct(moments, grid, opts);

    // Fit in zero-mean/unit-variance coordinates (raw exponents overflow for
    // shifted or wide data), then substitute the affine map back into the
    // polynomial.
    const double mean = moments.values[1];
    const double var = moments.values[2] - mean * mean;
    if (!(var > 0.0))
        throw DegenerateSamples("moment sequence has nonpositive variance");
    const double scale = std::sqrt(var);

    const MomentSequence zm = transform_moments(moments, mean, scale);
    const QuadratureGrid zgrid = transform_grid(grid, mean, scale);
    MaxEntDensity z = fit_maxent_direct(zm, zgrid, opts);

    // p_x(x) = p_z((x - mean)/scale) / scale
    std::vector<double> coeffs = poly_affine_compose(z.coefficients, mean, scale);
    coeffs[0] += std::log(scale);

    MaxEntDensity density;
    density.order = z.order;
    density.coefficients = std::move(coeffs);
    density.iterations = z.iterations;
    density.moment_residuals.resize(moments.order + 1);
    for (int k = 0; k <= moments.order; ++k) {
        const double mk = integrate(
            [&](double x) { return std::pow(x, k) * eval_maxent(density, x); },
            grid);
        density.moment_residuals[k] = mk - moments.values[k];
    }
    return density;
}

double eval_maxent(const MaxEntDensity& density, double x) {
    return std::exp(-poly_eval(density.coefficients, x));
}

double entropy(const std::function<double(double)>& density,
               const QuadratureGrid& grid) {
    return integrate(
        [&](double x) {
            const double p = density(x);
            if (p <= 1e-300)
                return 0.0;
            return -p * std::log(p);
        },
        grid);
}

double maxent_entropy(const MaxEntDensity& density,
                      const MomentSequence& moments) {
    if (density.order != moments.order)
        throw InvalidInput("maxent order does not match moment order");
    double h = 0.0;
    for (int k = 0; k <= density.order; ++k)
        h += density.coefficients[k] * moments.values[k];
    return h;
}

double kl_via_entropy_identity(const MaxEntDensity& density,
                               const MomentSequence& moments,
                               double target_entropy) {
    const double kl = maxent_entropy(density, moments) - target_entropy;
    if (kl < -1e-8)
        throw NegativeKl("entropy gap is negative: the target density cannot "
                         "share the maxent moments");
    return std::max(kl, 0.0);
}

double tv_upper_bound(double kl) {
    if (kl < 0.0)
        throw InvalidInput("KL divergence must be nonnegative");
    return 3.0 * std::sqrt(std::sqrt(1.0 + 4.0 * kl / 9.0) - 1.0);
}

BoundReport error_bound_report(const DensityEstimate& estimate,
                               const std::function<double(double)>& true_density,
                               const MomentSequence& moments,
                               const QuadratureGrid& grid,
                               const MaxEntOptions& opts) {
    const MaxEntDensity maxent = fit_maxent(moments, grid, opts);

    BoundReport report;
    report.h_maxent = maxent_entropy(maxent, moments);
    report.h_estimate =
        entropy([&](double x) { return eval_density(estimate, x); }, grid);
    report.h_true = entropy(true_density, grid);
    report.term_estimate = tv_upper_bound(
        kl_via_entropy_identity(maxent, moments, report.h_estimate));
    report.term_true =
        tv_upper_bound(kl_via_entropy_identity(maxent, moments, report.h_true));
    report.total = report.term_estimate + report.term_true;
    report.approximate = false;
    return report;
}

BoundReport error_bound_report_plugin(const DensityEstimate& estimate,
                                      double plugin_entropy,
                                      const MomentSequence& moments,
                                      const QuadratureGrid& grid,
                                      const MaxEntOptions& opts) {
    const MaxEntDensity maxent = fit_maxent(moments, grid, opts);

    BoundReport report;
    report.h_maxent = maxent_entropy(maxent, moments);
    report.h_estimate =
        entropy([&](double x) { return eval_density(estimate, x); }, grid);
    report.h_true = plugin_entropy;
    report.term_estimate = tv_upper_bound(
        kl_via_entropy_identity(maxent, moments, report.h_estimate));
    // A plug-in entropy can exceed H[maxent] by estimation error; clamp
    // instead of rejecting.
    report.term_true =
        tv_upper_bound(std::max(0.0, report.h_maxent - report.h_true));
    report.total = report.term_estimate + report.term_true;
    report.approximate = true;
    return report;
}

double histogram_entropy(std::span<const double> samples) {
    if (samples.size() < 4)
        throw InvalidInput("histogram entropy needs at least four samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const auto m = sorted.size();

    auto quantile = [&](double p) {
        const double idx = p * static_cast<double>(m - 1);
        const auto lo = static_cast<std::size_t>(idx);
        const double frac = idx - static_cast<double>(lo);
        if (lo + 1 >= m)
            return sorted.back();
        return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    const double span = sorted.back() - sorted.front();
    if (!(span > 0.0))
        throw DegenerateSamples("samples have zero spread");

    // Freedman-Diaconis width, with a fallback when the IQR degenerates.
    double width = 2.0 * iqr / std::cbrt(static_cast<double>(m));
    if (!(width > 0.0))
        width = span / std::ceil(std::sqrt(static_cast<double>(m)));

    const int bins = std::max(1, static_cast<int>(std::ceil(span / width)));
    std::vector<long> counts(bins, 0);
    for (double x : sorted) {
        int bin = static_cast<int>((x - sorted.front()) / width);
        bin = std::clamp(bin, 0, bins - 1);
        ++counts[bin];
    }
    double h = 0.0;
    for (long c : counts) {
        if (c == 0)
            continue;
        const double p = static_cast<double>(c) / static_cast<double>(m);
        h -= p * std::log(p / width);
    }
    return h;
}

double empirical_entropy(std::span<const double> samples) {
    if (samples.empty())
        throw InvalidInput("empirical entropy of an empty sample");
    std::map<double, long> counts;
    for (double x : samples)
        ++counts[x];
    double h = 0.0;
    for (const auto& [value, count] : counts) {
        (void)value;
        const double p =
            static_cast<double>(count) / static_cast<double>(samples.size());
        h -= p * std::log(p);
    }
    return h;
}

}  // namespace momdens
