#pragma once

#include "momdens/moments.hpp"

namespace momdens {

// Gaussian reference density r anchoring the moment estimators.
struct GaussianPrior {
    double mean = 0.0;
    double std_dev = 1.0;
};

// Data-driven default: mean = mu_1, variance = inflation * mu_2 so that the
// variance strictly exceeds the raw second moment. Wide references behave
// better on multimodal targets, hence the default inflation of 4.
GaussianPrior default_prior(const MomentSequence& moments,
                            double inflation = 4.0);

double eval_prior(const GaussianPrior& prior, double x);

// The reference seen from standardized coordinates z = (x - shift)/scale.
GaussianPrior standardize_prior(const GaussianPrior& prior,
                                const Standardization& st);

}  // namespace momdens
