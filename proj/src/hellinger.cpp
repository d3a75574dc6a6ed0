#include "momdens/hellinger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "momdens/polynomial.hpp"
#include "dual_newton.hpp"

namespace momdens {

namespace {

void validate_coeffs(const OmegaCoefficients& coeffs) {
    if (coeffs.order < 2 || coeffs.order % 2 != 0)
        throw InvalidInput("omega order must be even and >= 2");
    if (static_cast<int>(coeffs.b.size()) != coeffs.order + 1)
        throw InvalidInput("omega coefficient count does not match order");
}

// Index of the highest coefficient that is not noise, or -1 if all vanish.
int effective_degree(std::span<const double> b) {
    double mag = 0.0;
    for (double v : b)
        mag = std::max(mag, std::abs(v));
    const double tiny = 1e-14 * std::max(1.0, mag);
    for (int k = static_cast<int>(b.size()) - 1; k >= 0; --k)
        if (std::abs(b[k]) > tiny)
            return k;
    return -1;
}

// Node data shared by the objective, gradient and Hessian of one solve.
//
// The internal polynomial basis is t = (x - prior mean) / prior sigma: the
// Hessian is then a Hankel of near-unit Gaussian moments instead of raw
// monomial moments on a wide interval, which keeps its condition number low
// enough for Newton directions to survive in double precision. Coefficients
// and residuals are mapped back to the caller's x-basis exactly (binomial
// expansion of the affine substitution).
struct SolveTable {
    Eigen::ArrayXd tnode, w, r;
    int order;
    double shift, scale;       // x = shift + scale * t
    std::vector<double> tmu;   // moments of t
    Eigen::MatrixXd basis_map; // res_x = basis_map * res_t

    SolveTable(const GaussianPrior& prior, const QuadratureGrid& grid,
               const MomentSequence& moments)
        : order(moments.order), shift(prior.mean), scale(prior.std_dev) {
        const auto n = static_cast<Eigen::Index>(grid.nodes.size());
        tnode.resize(n);
        w.resize(n);
        r.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            tnode[i] = (grid.nodes[i] - shift) / scale;
            w[i] = grid.weights[i];
            r[i] = eval_prior(prior, grid.nodes[i]);
        }

        tmu = transform_moments(moments, shift, scale).values;

        // x^k = sum_j C(k,j) shift^{k-j} scale^j t^j
        const int dim = order + 1;
        basis_map = Eigen::MatrixXd::Zero(dim, dim);
        std::vector<std::vector<double>> binom(dim);
        for (int i = 0; i < dim; ++i) {
            binom[i].assign(i + 1, 1.0);
            for (int j = 1; j < i; ++j)
                binom[i][j] = binom[i - 1][j - 1] + binom[i - 1][j];
        }
        for (int k = 0; k < dim; ++k)
            for (int j = 0; j <= k; ++j)
                basis_map(k, j) =
                    binom[k][j] * std::pow(shift, k - j) * std::pow(scale, j);
    }

    double omega_at(std::span<const double> bt, Eigen::Index i) const {
        double v = 0.0;
        for (int k = order; k >= 0; --k)
            v = v * tnode[i] + bt[k];
        return 1.0 + v;
    }

    std::vector<double> initial() const {
        return std::vector<double>(order + 1, 0.0);  // omega = 1, p = r
    }

    std::vector<double> r_moments() const {
        std::vector<long double> acc(order + 1, 0.0L);
        for (Eigen::Index i = 0; i < tnode.size(); ++i) {
            long double power = w[i] * r[i];
            for (int k = 0; k <= order; ++k) {
                acc[k] += power;
                power *= tnode[i];
            }
        }
        return std::vector<double>(acc.begin(), acc.end());
    }

    bool interior(std::span<const double> bt, double eps) const {
        for (Eigen::Index i = 0; i < tnode.size(); ++i)
            if (!(omega_at(bt, i) >= eps))
                return false;
        return true;
    }

    double objective(std::span<const double> bt,
                     std::span<const double> mu) const {
        long double linear = 0.0L;
        for (int k = 0; k <= order; ++k)
            linear += static_cast<long double>(bt[k]) * mu[k];
        long double sum = 0.0L;
        for (Eigen::Index i = 0; i < tnode.size(); ++i) {
            const double om = omega_at(bt, i);
            if (!(om > 0.0))
                return std::numeric_limits<double>::infinity();
            sum += static_cast<long double>(w[i] * r[i]) / om;
        }
        return static_cast<double>(linear + sum);
    }

    // mu_k - integral t^k r / omega^2
    Eigen::VectorXd gradient(std::span<const double> bt,
                             std::span<const double> mu) const {
        std::vector<long double> acc(order + 1, 0.0L);
        for (Eigen::Index i = 0; i < tnode.size(); ++i) {
            const double om = omega_at(bt, i);
            const double dens = w[i] * r[i] / (om * om);
            long double power = dens;
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

    // integral 2 t^{k+l} r / omega^3
    Eigen::MatrixXd hessian(std::span<const double> bt) const {
        std::vector<long double> s(2 * order + 1, 0.0L);
        for (Eigen::Index i = 0; i < tnode.size(); ++i) {
            const double om = omega_at(bt, i);
            const double dens = 2.0 * w[i] * r[i] / (om * om * om);
            long double power = dens;
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

    // omega(x) = 1 + sum_k bt_k t(x)^k expanded in powers of x.
    std::vector<double> to_x_basis(std::span<const double> bt) const {
        return poly_affine_compose(bt, shift, scale);
    }

    std::vector<double> from_x_basis(std::span<const double> bx) const {
        // t(x) inverted: x = shift + scale t, so compose with the map
        // (t - (-shift/scale)) / (1/scale).
        return poly_affine_compose(bx, -shift / scale, 1.0 / scale);
    }
};

void check_inputs(const OmegaCoefficients& coeffs, const MomentSequence& moments,
                  const QuadratureGrid& grid) {
    validate_coeffs(coeffs);
    if (moments.order != coeffs.order)
        throw InvalidInput("moment order does not match omega order");
    if (!is_feasible(coeffs, grid, 1e-300))
        throw InfeasiblePoint("omega is not strictly positive on the grid");
}

// Doubling the panel count must not move the prior moment integrals: if it
// does, every integrand of the solve is under-resolved.
void grid_self_check(const GaussianPrior& prior, const QuadratureGrid& grid,
                     int order, double tol) {
    const QuadratureGrid fine = refine_grid(grid);
    for (int k = 0; k <= order; ++k) {
        const auto f = [&](double x) {
            const double t = (x - prior.mean) / prior.std_dev;
            return std::pow(t, k) * eval_prior(prior, x);
        };
        const double coarse_val = integrate(f, grid);
        const double fine_val = integrate(f, fine);
        if (std::abs(coarse_val - fine_val) > tol)
            throw GridInsufficient(
                "quadrature grid does not resolve the prior moments (order " +
                std::to_string(k) + ")");
    }
}

}  // namespace

double omega_eval(const OmegaCoefficients& coeffs, double x) {
    return 1.0 + poly_eval(coeffs.b, x);
}

bool is_feasible(const OmegaCoefficients& coeffs, const QuadratureGrid& grid,
                 double eps) {
    validate_coeffs(coeffs);
    if (!(eps > 0.0))
        throw InvalidInput("feasibility margin must be positive");
    const int lead = effective_degree(coeffs.b);
    if (lead >= 1 && (lead % 2 == 1 || coeffs.b[lead] < 0.0))
        return false;
    for (double x : grid.nodes)
        if (!(omega_eval(coeffs, x) >= eps))
            return false;
    return true;
}

double dual_objective(const OmegaCoefficients& coeffs,
                      const MomentSequence& moments,
                      const GaussianPrior& prior, const QuadratureGrid& grid) {
    check_inputs(coeffs, moments, grid);
    double linear = 0.0;
    for (int k = 0; k <= coeffs.order; ++k)
        linear += coeffs.b[k] * moments.values[k];
    return linear + integrate(
                        [&](double x) {
                            return eval_prior(prior, x) / omega_eval(coeffs, x);
                        },
                        grid);
}

Eigen::VectorXd dual_gradient(const OmegaCoefficients& coeffs,
                              const MomentSequence& moments,
                              const GaussianPrior& prior,
                              const QuadratureGrid& grid) {
    check_inputs(coeffs, moments, grid);
    Eigen::VectorXd g(coeffs.order + 1);
    for (int k = 0; k <= coeffs.order; ++k) {
        g[k] = moments.values[k] -
               integrate(
                   [&](double x) {
                       const double om = omega_eval(coeffs, x);
                       return std::pow(x, k) * eval_prior(prior, x) / (om * om);
                   },
                   grid);
    }
    return g;
}

Eigen::MatrixXd dual_hessian(const OmegaCoefficients& coeffs,
                             const MomentSequence& moments,
                             const GaussianPrior& prior,
                             const QuadratureGrid& grid) {
    check_inputs(coeffs, moments, grid);
    const int order = coeffs.order;
    std::vector<double> s(2 * order + 1);
    for (int k = 0; k <= 2 * order; ++k) {
        s[k] = integrate(
            [&](double x) {
                const double om = omega_eval(coeffs, x);
                return 2.0 * std::pow(x, k) * eval_prior(prior, x) /
                       (om * om * om);
            },
            grid);
    }
    Eigen::MatrixXd h(order + 1, order + 1);
    for (int k = 0; k <= order; ++k)
        for (int l = 0; l <= order; ++l)
            h(k, l) = s[k + l];
    return h;
}

DensityEstimate solve(const MomentSequence& moments, const GaussianPrior& prior,
                      const QuadratureGrid& grid, const SolveOptions& opts) {
    require_positive_definite(moments);
    if (opts.check_grid)
        grid_self_check(prior, grid, moments.order, opts.grid_check_tol);

    const int order = moments.order;
    const int dim = order + 1;
    const SolveTable table(prior, grid, moments);

    std::vector<double> warm_bt;
    const std::vector<double>* warm_ptr = nullptr;
    if (opts.warm_start) {
        if (static_cast<int>(opts.warm_start->size()) != dim)
            throw InvalidInput("warm start has the wrong length");
        const OmegaCoefficients ws{order, *opts.warm_start};
        if (!is_feasible(ws, grid, opts.eps_feas))
            throw InfeasiblePoint("warm start is outside the feasible cone");
        warm_bt = table.from_x_basis(*opts.warm_start);
        warm_ptr = &warm_bt;
    }

    // Core grid for the barrier phase: keep only the region where the
    // reference density has numerically meaningful mass (about 5 sigma).
    const double core_hw = std::min(5.0 * prior.std_dev, grid.half_width);
    const QuadratureGrid core_grid = build_grid(prior.mean, core_hw, grid.panels,
                                                grid.nodes_per_panel);
    const SolveTable core(prior, core_grid, moments);

    detail::NewtonState state = detail::minimize_dual(table, core, opts, warm_ptr);

    SolveDiagnostics diag;
    diag.iterations = state.iterations_total;
    diag.final_gradient_norm = state.gradient_x.lpNorm<Eigen::Infinity>();
    diag.objective = state.objective;
    diag.converged = state.converged;
    diag.objective_trace = state.trace;
    diag.moment_residuals.resize(dim);
    for (int k = 0; k < dim; ++k)
        diag.moment_residuals[k] = -state.gradient_x[k];

    if (!state.converged && opts.throw_on_nonconvergence)
        throw NotConverged("dual Newton did not converge", diag.iterations,
                           diag.final_gradient_norm);

    DensityEstimate estimate;
    estimate.prior = prior;
    estimate.coeffs = OmegaCoefficients{order, table.to_x_basis(state.bt)};
    estimate.standardization = Standardization{};
    estimate.diagnostics = std::move(diag);
    return estimate;
}

double eval_density(const DensityEstimate& estimate, double x) {
    const auto& st = estimate.standardization;
    const double z = (x - st.shift) / st.scale;
    const double om = omega_eval(estimate.coeffs, z);
    return eval_prior(estimate.prior, z) / (om * om) / st.scale;
}

std::vector<double> verify_moments(const DensityEstimate& estimate,
                                   const MomentSequence& moments,
                                   const QuadratureGrid& grid) {
    std::vector<double> residuals(moments.order + 1);
    for (int k = 0; k <= moments.order; ++k) {
        const double mk = integrate(
            [&](double x) { return std::pow(x, k) * eval_density(estimate, x); },
            grid);
        residuals[k] = mk - moments.values[k];
    }
    return residuals;
}

Eigen::MatrixXd hankel_multiplier(const OmegaCoefficients& coeffs) {
    validate_coeffs(coeffs);
    const int n = coeffs.order / 2;
    Eigen::MatrixXd w(n + 1, n + 1);
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            const int k = i + j;
            const double multiplicity = (k <= n) ? k + 1 : 2 * n - k + 1;
            w(i, j) = coeffs.b[k] / multiplicity;
        }
    }
    return w;
}

bool certify_positive_on_reals(const OmegaCoefficients& coeffs) {
    validate_coeffs(coeffs);
    // omega = 1 + sum b_k x^k as a plain coefficient vector.
    std::vector<double> poly(coeffs.b);
    poly[0] += 1.0;

    const int degree = effective_degree(poly);
    if (degree <= 0)
        return poly[0] > 0.0;

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (int i = 1; i < degree; ++i)
        companion(i, i - 1) = 1.0;
    for (int i = 0; i < degree; ++i)
        companion(i, degree - 1) = -poly[i] / poly[degree];

    const Eigen::VectorXcd roots =
        Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues();
    for (int i = 0; i < roots.size(); ++i) {
        if (std::abs(roots[i].imag()) <= 1e-8 * (1.0 + std::abs(roots[i].real())))
            return false;  // a real crossing
    }
    return omega_eval(coeffs, 0.0) > 0.0;
}

QuadratureGrid grid_for_prior(const GaussianPrior& prior,
                              const GridOptions& opts) {
    return build_grid(prior.mean, opts.half_width_sigmas * prior.std_dev,
                      opts.panels, opts.nodes_per_panel);
}

namespace {

DensityEstimate fit_standardized(const MomentSequence& raw_moments,
                                 const MomentSequence& solve_moments,
                                 const Standardization& st,
                                 const FitOptions& opts) {
    GaussianPrior prior_raw =
        opts.prior ? *opts.prior : default_prior(raw_moments, opts.prior_inflation);
    const GaussianPrior prior_solve = standardize_prior(prior_raw, st);
    const QuadratureGrid grid = grid_for_prior(prior_solve, opts.grid);
    DensityEstimate estimate = solve(solve_moments, prior_solve, grid, opts.solver);
    estimate.standardization = st;
    return estimate;
}

}  // namespace

DensityEstimate fit_dpmsh(std::span<const double> samples, int order,
                          const FitOptions& opts) {
    const MomentSequence raw = compute_sample_moments(samples, order);
    if (!opts.standardize) {
        return fit_standardized(raw, raw, Standardization{}, opts);
    }
    const Standardization st = fit_standardization(samples);
    const std::vector<double> z = apply_standardization(st, samples);
    const MomentSequence zm = compute_sample_moments(z, order);
    return fit_standardized(raw, zm, st, opts);
}

DensityEstimate fit_dpmsh_moments(const MomentSequence& raw_moments,
                                  const FitOptions& opts) {
    if (!opts.standardize)
        return fit_standardized(raw_moments, raw_moments, Standardization{}, opts);
    const double mean = raw_moments.values[1];
    const double var = raw_moments.values[2] - mean * mean;
    if (!(var > 0.0))
        throw DegenerateSamples("moment sequence has nonpositive variance");
    const Standardization st{mean, std::sqrt(var)};
    const MomentSequence zm = transform_moments(raw_moments, st.shift, st.scale);
    return fit_standardized(raw_moments, zm, st, opts);
}

}  // namespace momdens
