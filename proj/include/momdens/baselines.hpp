#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "momdens/hellinger.hpp"
#include "momdens/moments.hpp"
#include "momdens/priors.hpp"
#include "momdens/quadrature.hpp"

namespace momdens {

// Gaussian-kernel density estimate.
struct KdeModel {
    std::vector<double> centers;
    double bandwidth = 1.0;
};

// Silverman's robust rule of thumb: 0.9 min(sd, IQR/1.34) m^{-1/5}.
double silverman_bandwidth(std::span<const double> samples);

KdeModel kde_fit(std::span<const double> samples);

double eval_kde(const KdeModel& model, double x);

struct GmmModel {
    std::vector<double> weights;
    std::vector<double> means;
    std::vector<double> std_devs;
};

struct GmmOptions {
    int restarts = 10;
    int max_iter = 200;
    double tol = 1e-8;                       // relative log-likelihood change
    std::vector<double>* ll_trace = nullptr; // trace of the winning run
};

// EM with kmeans++-style seeding, best of `restarts` by log-likelihood.
// A component whose variance falls below 1e-6 times the sample variance
// aborts that restart; if every restart collapses, CollapsedComponent.
GmmModel gmm_fit(std::span<const double> samples, int k, std::uint64_t seed,
                 const GmmOptions& opts = {});

double eval_gmm(const GmmModel& model, double x);

// Kullback-Leibler moment estimate p = r / omega with the homogeneous weight
// omega(x) = sum_k b_k x^k (no unit offset; the mass constraint absorbs
// normalization). Dual: minimize sum_k b_k mu_k - integral r log omega.
struct KlEstimate {
    GaussianPrior prior;
    OmegaCoefficients coeffs;  // b spans the full polynomial, including b_0
    Standardization standardization;
    SolveDiagnostics diagnostics;
};

KlEstimate dpmkl_solve(const MomentSequence& moments, const GaussianPrior& prior,
                       const QuadratureGrid& grid, const SolveOptions& opts = {});

KlEstimate fit_dpmkl(std::span<const double> samples, int order,
                     const FitOptions& opts = {});

KlEstimate fit_dpmkl_moments(const MomentSequence& raw_moments,
                             const FitOptions& opts = {});

double eval_kl_estimate(const KlEstimate& estimate, double x);

}  // namespace momdens
