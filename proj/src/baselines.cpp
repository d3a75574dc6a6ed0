#include "momdens/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "momdens/polynomial.hpp"
#include "momdens/rng.hpp"
#include "dual_newton.hpp"

namespace momdens {

namespace {

double sample_std(std::span<const double> samples) {
    const double m = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double x : samples)
        mean += x;
    mean /= m;
    double ss = 0.0;
    for (double x : samples)
        ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (m - 1.0));
}

double interpolated_quantile(std::vector<double> sorted, double p) {
    const double idx = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(idx);
    const double frac = idx - static_cast<double>(lo);
    if (lo + 1 >= sorted.size())
        return sorted.back();
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

double gauss(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

double silverman_bandwidth(std::span<const double> samples) {
    if (samples.size() < 2)
        throw InvalidInput("bandwidth selection needs at least two samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double sd = sample_std(samples);
    const double iqr =
        interpolated_quantile(sorted, 0.75) - interpolated_quantile(sorted, 0.25);
    double spread = sd;
    if (iqr > 0.0)
        spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0))
        throw DegenerateSamples("samples have zero spread");
    return 0.9 * spread *
           std::pow(static_cast<double>(samples.size()), -0.2);
}

KdeModel kde_fit(std::span<const double> samples) {
    KdeModel model;
    model.bandwidth = silverman_bandwidth(samples);
    model.centers.assign(samples.begin(), samples.end());
    return model;
}

double eval_kde(const KdeModel& model, double x) {
    if (model.centers.empty() || !(model.bandwidth > 0.0))
        throw InvalidInput("KDE model is empty or has nonpositive bandwidth");
    double sum = 0.0;
    for (double c : model.centers)
        sum += gauss((x - c) / model.bandwidth);
    return sum / (model.bandwidth * static_cast<double>(model.centers.size()));
}

// ---- GMM -------------------------------------------------------------------

namespace {

struct EmResult {
    GmmModel model;
    double log_likelihood = -std::numeric_limits<double>::infinity();
    std::vector<double> trace;
    bool collapsed = false;
};

EmResult run_em(std::span<const double> samples, int k, Rng& rng,
                const GmmOptions& opts, double var_floor) {
    const auto m = samples.size();
    EmResult res;

    // kmeans++-style seeding on the raw points.
    std::vector<double> centers;
    centers.push_back(samples[static_cast<std::size_t>(
        rng.uniform01() * static_cast<double>(m))]);
    while (static_cast<int>(centers.size()) < k) {
        std::vector<double> d2(m);
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (double c : centers)
                best = std::min(best, (samples[i] - c) * (samples[i] - c));
            d2[i] = best;
            total += best;
        }
        double u = rng.uniform01() * total;
        std::size_t pick = m - 1;
        for (std::size_t i = 0; i < m; ++i) {
            u -= d2[i];
            if (u <= 0.0) {
                pick = i;
                break;
            }
        }
        centers.push_back(samples[pick]);
    }

    GmmModel g;
    g.weights.assign(k, 1.0 / k);
    g.means = centers;
    const double sd0 = sample_std(samples);
    g.std_devs.assign(k, sd0);

    std::vector<double> resp(m * k);
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        // E step
        double ll = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double norm = 0.0;
            for (int j = 0; j < k; ++j) {
                const double p =
                    g.weights[j] *
                    gauss((samples[i] - g.means[j]) / g.std_devs[j]) /
                    g.std_devs[j];
                resp[i * k + j] = p;
                norm += p;
            }
            if (!(norm > 0.0)) {
                res.collapsed = true;
                return res;
            }
            for (int j = 0; j < k; ++j)
                resp[i * k + j] /= norm;
            ll += std::log(norm);
        }
        res.trace.push_back(ll);

        // M step
        for (int j = 0; j < k; ++j) {
            double nj = 0.0, mean = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                nj += resp[i * k + j];
                mean += resp[i * k + j] * samples[i];
            }
            if (!(nj > 0.0)) {
                res.collapsed = true;
                return res;
            }
            mean /= nj;
            double var = 0.0;
            for (std::size_t i = 0; i < m; ++i)
                var += resp[i * k + j] * (samples[i] - mean) * (samples[i] - mean);
            var /= nj;
            if (var < var_floor) {
                res.collapsed = true;
                return res;
            }
            g.weights[j] = nj / static_cast<double>(m);
            g.means[j] = mean;
            g.std_devs[j] = std::sqrt(var);
        }

        if (iter > 0 && std::abs(ll - prev_ll) <= opts.tol * (1.0 + std::abs(ll)))
            break;
        prev_ll = ll;
    }

    res.model = g;
    res.log_likelihood = res.trace.empty() ? prev_ll : res.trace.back();
    return res;
}

}  // namespace

GmmModel gmm_fit(std::span<const double> samples, int k, std::uint64_t seed,
                 const GmmOptions& opts) {
    if (k < 1)
        throw InvalidInput("GMM needs at least one component");
    if (static_cast<int>(samples.size()) < 2 * k)
        throw InvalidInput("GMM needs at least 2k samples");

    const double sd = sample_std(samples);
    if (!(sd > 0.0))
        throw DegenerateSamples("samples have zero spread");
    const double var_floor = 1e-6 * sd * sd;

    EmResult best;
    bool any = false;
    for (int restart = 0; restart < opts.restarts; ++restart) {
        Rng rng(Rng::child_seed(seed, static_cast<std::uint64_t>(restart)));
        EmResult r = run_em(samples, k, rng, opts, var_floor);
        if (r.collapsed)
            continue;  // re-seed via the next restart
        any = true;
        if (r.log_likelihood > best.log_likelihood)
            best = std::move(r);
    }
    if (!any)
        throw CollapsedComponent("every EM restart collapsed a component");
    if (opts.ll_trace)
        *opts.ll_trace = best.trace;
    return best.model;
}

double eval_gmm(const GmmModel& model, double x) {
    double p = 0.0;
    for (std::size_t j = 0; j < model.weights.size(); ++j)
        p += model.weights[j] * gauss((x - model.means[j]) / model.std_devs[j]) /
             model.std_devs[j];
    return p;
}

// ---- DPMKL -----------------------------------------------------------------

namespace {

// Node table for the KL dual with the homogeneous weight
// omega(x) = sum_k b_k x^k. Same prior-standardized internal basis as the
// Hellinger solver, for the same conditioning reasons.
struct KlTable {
    Eigen::ArrayXd tnode, w, r;
    int order;
    double shift, scale;
    std::vector<double> tmu;
    Eigen::MatrixXd basis_map;

    KlTable(const GaussianPrior& prior, const QuadratureGrid& grid,
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
        return v;
    }

    std::vector<double> initial() const {
        std::vector<double> bt(order + 1, 0.0);
        bt[0] = 1.0;  // omega = 1, p = r
        return bt;
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
            sum -= static_cast<long double>(w[i] * r[i]) * std::log(om);
        }
        return static_cast<double>(linear + sum);
    }

    // mu_k - integral t^k r / omega
    Eigen::VectorXd gradient(std::span<const double> bt,
                             std::span<const double> mu) const {
        std::vector<long double> acc(order + 1, 0.0L);
        for (Eigen::Index i = 0; i < tnode.size(); ++i) {
            const double om = omega_at(bt, i);
            const double dens = w[i] * r[i] / om;
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

    // integral t^{k+l} r / omega^2
    Eigen::MatrixXd hessian(std::span<const double> bt) const {
        std::vector<long double> s(2 * order + 1, 0.0L);
        for (Eigen::Index i = 0; i < tnode.size(); ++i) {
            const double om = omega_at(bt, i);
            const double dens = w[i] * r[i] / (om * om);
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

    std::vector<double> to_x_basis(std::span<const double> bt) const {
        return poly_affine_compose(bt, shift, scale);
    }

    std::vector<double> from_x_basis(std::span<const double> bx) const {
        return poly_affine_compose(bx, -shift / scale, 1.0 / scale);
    }
};

}  // namespace

KlEstimate dpmkl_solve(const MomentSequence& moments, const GaussianPrior& prior,
                       const QuadratureGrid& grid, const SolveOptions& opts) {
    require_positive_definite(moments);

    const int order = moments.order;
    const int dim = order + 1;
    const KlTable table(prior, grid, moments);

    std::vector<double> warm_bt;
    const std::vector<double>* warm_ptr = nullptr;
    if (opts.warm_start) {
        if (static_cast<int>(opts.warm_start->size()) != dim)
            throw InvalidInput("warm start has the wrong length");
        warm_bt = table.from_x_basis(*opts.warm_start);
        if (!table.interior(warm_bt, opts.eps_feas))
            throw InfeasiblePoint("warm start is outside the feasible cone");
        warm_ptr = &warm_bt;
    }

    const double core_hw = std::min(5.0 * prior.std_dev, grid.half_width);
    const QuadratureGrid core_grid = build_grid(prior.mean, core_hw, grid.panels,
                                                grid.nodes_per_panel);
    const KlTable core(prior, core_grid, moments);

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
        throw NotConverged("KL dual Newton did not converge", diag.iterations,
                           diag.final_gradient_norm);

    KlEstimate estimate;
    estimate.prior = prior;
    estimate.coeffs = OmegaCoefficients{order, table.to_x_basis(state.bt)};
    estimate.standardization = Standardization{};
    estimate.diagnostics = std::move(diag);
    return estimate;
}

namespace {

KlEstimate fit_kl_standardized(const MomentSequence& raw_moments,
                               const MomentSequence& solve_moments,
                               const Standardization& st,
                               const FitOptions& opts) {
    GaussianPrior prior_raw =
        opts.prior ? *opts.prior : default_prior(raw_moments, opts.prior_inflation);
    const GaussianPrior prior_solve = standardize_prior(prior_raw, st);
    const QuadratureGrid grid = grid_for_prior(prior_solve, opts.grid);
    KlEstimate estimate = dpmkl_solve(solve_moments, prior_solve, grid, opts.solver);
    estimate.standardization = st;
    return estimate;
}

}  // namespace

KlEstimate fit_dpmkl(std::span<const double> samples, int order,
                     const FitOptions& opts) {
    const MomentSequence raw = compute_sample_moments(samples, order);
    if (!opts.standardize)
        return fit_kl_standardized(raw, raw, Standardization{}, opts);
    const Standardization st = fit_standardization(samples);
    const std::vector<double> z = apply_standardization(st, samples);
    const MomentSequence zm = compute_sample_moments(z, order);
    return fit_kl_standardized(raw, zm, st, opts);
}

KlEstimate fit_dpmkl_moments(const MomentSequence& raw_moments,
                             const FitOptions& opts) {
    if (!opts.standardize)
        return fit_kl_standardized(raw_moments, raw_moments, Standardization{},
                                   opts);
    const double mean = raw_moments.values[1];
    const double var = raw_moments.values[2] - mean * mean;
    if (!(var > 0.0))
        throw DegenerateSamples("moment sequence has nonpositive variance");
    const Standardization st{mean, std::sqrt(var)};
    const MomentSequence zm = transform_moments(raw_moments, st.shift, st.scale);
    return fit_kl_standardized(raw_moments, zm, st, opts);
}

double eval_kl_estimate(const KlEstimate& estimate, double x) {
    const auto& st = estimate.standardization;
    const double z = (x - st.shift) / st.scale;
    const double om = poly_eval(estimate.coeffs.b, z);
    return eval_prior(estimate.prior, z) / om / st.scale;
}

}  // namespace momdens
