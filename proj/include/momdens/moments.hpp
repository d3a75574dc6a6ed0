#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "momdens/errors.hpp"

namespace momdens {

// Sample power moments mu_0..mu_{2n} of an i.i.d. sample of size m,
// mu_k = (1/m) sum_j X_j^k. mu_0 is 1 by construction.
struct MomentSequence {
    int order = 0;                 // even, >= 2
    std::vector<double> values;    // length order + 1
    long sample_count = 0;         // m (0 when the sequence is synthetic)
};

// Affine sample map z = (x - shift) / scale.
struct Standardization {
    double shift = 0.0;
    double scale = 1.0;
    bool is_identity() const { return shift == 0.0 && scale == 1.0; }
};

// (n+1) x (n+1) matrix with entries[i][j] = mu_{i+j}. Positive definiteness
// certifies solvability of the truncated moment problem on the line.
struct HankelMatrix {
    Eigen::MatrixXd entries;
    int size() const { return static_cast<int>(entries.rows()); }
};

struct PdCertificate {
    bool is_pd = false;
    double min_eigenvalue = 0.0;
};

// Moments are accumulated with compensated (Kahan) summation; high-order
// powers of large samples lose digits under naive accumulation.
MomentSequence compute_sample_moments(std::span<const double> samples,
                                      int order);

// Zero-mean/unit-variance map fitted from the sample (population variance).
Standardization fit_standardization(std::span<const double> samples);

std::vector<double> apply_standardization(const Standardization& st,
                                          std::span<const double> samples);

// Moments of z = (x - shift)/scale from the moments of x (binomial push-forward).
MomentSequence transform_moments(const MomentSequence& moments, double shift,
                                 double scale);

HankelMatrix build_hankel(const MomentSequence& moments);

// is_pd is true iff the smallest eigenvalue exceeds tol.
PdCertificate certify_positive_definite(const HankelMatrix& h, double tol);

// Scale-relative default: 1e-12 times the largest diagonal entry.
double default_pd_tolerance(const HankelMatrix& h);

// Convenience gate used by the solvers; throws DegenerateSamples when the
// certificate fails.
void require_positive_definite(const MomentSequence& moments);

}  // namespace momdens
