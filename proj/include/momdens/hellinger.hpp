#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "momdens/moments.hpp"
#include "momdens/priors.hpp"
#include "momdens/quadrature.hpp"

namespace momdens {

// Multiplier for the moment constraints, stored through the weight polynomial
// omega(x) = 1 + sum_k b_k x^k of degree <= 2n. The quadratic form F'WF of
// any Hankel matrix W collapses to such a polynomial, so these 2n+1 numbers
// are a redundancy-free coordinate for the feasible cone.
struct OmegaCoefficients {
    int order = 0;            // 2n
    std::vector<double> b;    // length order + 1
};

struct SolveOptions {
    int max_iter = 800;            // accepted Newton steps across all phases
    double tol_grad = 1e-9;        // per-order relative dual gradient
    double tol_mom = 1e-6;         // per-order relative moment residual
    double eps_feas = 1e-8;        // interior margin for omega on the grid
    double ls_shrink = 0.5;        // backtracking factor
    double armijo = 1e-4;
    bool check_grid = true;        // pre-solve resolution self-check
    double grid_check_tol = 1e-8;
    bool throw_on_nonconvergence = true;
    std::optional<std::vector<double>> warm_start;
};

struct SolveDiagnostics {
    int iterations = 0;
    double final_gradient_norm = 0.0;
    std::vector<double> moment_residuals;   // integral x^k p - mu_k, solve space
    std::vector<double> objective_trace;    // value at each accepted iterate
    double objective = 0.0;
    bool converged = false;
};

// A solved estimate p(x) = r(z) / omega(z)^2 / scale with z = (x - shift)/scale.
// prior and coefficients live in the (possibly standardized) solve
// coordinates; standardization maps evaluation points into them.
struct DensityEstimate {
    GaussianPrior prior;
    OmegaCoefficients coeffs;
    Standardization standardization;
    SolveDiagnostics diagnostics;
};

double omega_eval(const OmegaCoefficients& coeffs, double x);

// Strict positivity of omega on the grid (margin eps) plus a leading-
// coefficient screen: the highest surviving coefficient must sit at an even
// power with positive sign, otherwise omega escapes to -inf off the grid.
bool is_feasible(const OmegaCoefficients& coeffs, const QuadratureGrid& grid,
                 double eps);

// Dual functional  J(b) = sum_k b_k mu_k + integral r / omega dx.
double dual_objective(const OmegaCoefficients& coeffs,
                      const MomentSequence& moments,
                      const GaussianPrior& prior, const QuadratureGrid& grid);

// gradient[k] = mu_k - integral x^k r / omega^2 dx
Eigen::VectorXd dual_gradient(const OmegaCoefficients& coeffs,
                              const MomentSequence& moments,
                              const GaussianPrior& prior,
                              const QuadratureGrid& grid);

// H[k][l] = integral 2 x^{k+l} r / omega^3 dx  (symmetric positive definite)
Eigen::MatrixXd dual_hessian(const OmegaCoefficients& coeffs,
                             const MomentSequence& moments,
                             const GaussianPrior& prior,
                             const QuadratureGrid& grid);

// Damped Newton descent of the dual from omega = 1, with backtracking that
// keeps iterates strictly inside the feasible cone. The minimizer is unique;
// at it the estimate reproduces every input moment.
DensityEstimate solve(const MomentSequence& moments, const GaussianPrior& prior,
                      const QuadratureGrid& grid, const SolveOptions& opts = {});

double eval_density(const DensityEstimate& estimate, double x);

// residuals[k] = integral x^k p dx - mu_k over the given grid.
std::vector<double> verify_moments(const DensityEstimate& estimate,
                                   const MomentSequence& moments,
                                   const QuadratureGrid& grid);

// Hankel representative W of the multiplier: W_ij = b_{i+j} / c_{i+j} with
// c_k the number of (i,j) pairs summing to k, so that trace(W M) equals
// sum_k b_k mu_k.
Eigen::MatrixXd hankel_multiplier(const OmegaCoefficients& coeffs);

// Optional exact certificate: omega has no real roots (companion-matrix
// eigenvalues) and is positive at the origin, hence positive on all of R.
bool certify_positive_on_reals(const OmegaCoefficients& coeffs);

// ---- sample/moment entry points ------------------------------------------

struct GridOptions {
    double half_width_sigmas = 12.0;  // half-width in units of the prior sigma
    int panels = 160;
    int nodes_per_panel = 16;
};

struct FitOptions {
    bool standardize = true;
    double prior_inflation = 4.0;
    std::optional<GaussianPrior> prior;  // reference in raw coordinates
    GridOptions grid;
    SolveOptions solver;
};

QuadratureGrid grid_for_prior(const GaussianPrior& prior,
                              const GridOptions& opts);

DensityEstimate fit_dpmsh(std::span<const double> samples, int order,
                          const FitOptions& opts = {});

// Same pipeline starting from a moment sequence in raw coordinates (e.g.
// population moments); standardization is derived from mu_1 and mu_2.
DensityEstimate fit_dpmsh_moments(const MomentSequence& raw_moments,
                                  const FitOptions& opts = {});

}  // namespace momdens
