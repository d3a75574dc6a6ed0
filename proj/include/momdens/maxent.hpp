#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "momdens/hellinger.hpp"
#include "momdens/moments.hpp"
#include "momdens/quadrature.hpp"

namespace momdens {

// Shannon-entropy maximizer under the same moment constraints:
// p(x) = exp(-sum_i m_i x^i). Coefficients are stored in the original
// coordinates even when the fit ran standardized.
struct MaxEntDensity {
    int order = 0;
    std::vector<double> coefficients;       // length order + 1, leading > 0
    std::vector<double> moment_residuals;   // vs the input moments
    int iterations = 0;
};

struct MaxEntOptions {
    int max_iter = 600;
    double tol_grad = 1e-9;
    double tol_mom = 1e-6;
    bool standardize = true;
    bool throw_on_nonconvergence = true;
};

// Newton descent of the convex potential
//   Gamma(m) = integral exp(-sum m_i x^i) dx + sum m_i mu_i,
// whose gradient is exactly the moment residual vector. Initialized at the
// Gaussian matching mu_1, mu_2.
MaxEntDensity fit_maxent(const MomentSequence& moments,
                         const QuadratureGrid& grid,
                         const MaxEntOptions& opts = {});

double eval_maxent(const MaxEntDensity& density, double x);

// Differential entropy -integral p log p, with 0 log 0 := 0.
double entropy(const std::function<double(double)>& density,
               const QuadratureGrid& grid);

// H of the maxent density itself via the exact identity sum_i m_i mu_i.
double maxent_entropy(const MaxEntDensity& density,
                      const MomentSequence& moments);

// KL(p || maxent) = H[maxent] - H[p] for any p sharing the moments. Throws
// NegativeKl below -1e-8: the target cannot have those moments.
double kl_via_entropy_identity(const MaxEntDensity& density,
                               const MomentSequence& moments,
                               double target_entropy);

// 3 * sqrt(sqrt(1 + 4 kl / 9) - 1), monotone in kl.
double tv_upper_bound(double kl);

struct BoundReport {
    double h_maxent = 0.0;
    double h_estimate = 0.0;
    double h_true = 0.0;          // exact or plug-in, see `approximate`
    double term_estimate = 0.0;   // tv bound through the estimate entropy gap
    double term_true = 0.0;       // tv bound through the true entropy gap
    double total = 0.0;
    bool approximate = false;     // true when h_true is a plug-in value
};

// Chains the two entropy gaps through the shared maxent density into a bound
// on the sup-CDF distance between the moment estimate and the truth.
BoundReport error_bound_report(const DensityEstimate& estimate,
                               const std::function<double(double)>& true_density,
                               const MomentSequence& moments,
                               const QuadratureGrid& grid,
                               const MaxEntOptions& opts = {});

// Variant for the sample-only case: the true entropy is replaced by a
// plug-in estimate and the report is flagged approximate.
BoundReport error_bound_report_plugin(const DensityEstimate& estimate,
                                      double plugin_entropy,
                                      const MomentSequence& moments,
                                      const QuadratureGrid& grid,
                                      const MaxEntOptions& opts = {});

// Histogram plug-in entropy with Freedman-Diaconis bin width (default choice
// for sample-only bound reports).
double histogram_entropy(std::span<const double> samples);

// Literal empirical-distribution entropy -sum r_i log r_i with r_i the
// relative frequency of each distinct value. For continuous samples without
// ties this is log m regardless of the data; kept as an opt-in variant.
double empirical_entropy(std::span<const double> samples);

}  // namespace momdens
