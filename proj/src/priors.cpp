#include "momdens/priors.hpp"

#include <cmath>
#include <numbers>

namespace momdens {

GaussianPrior default_prior(const MomentSequence& moments, double inflation) {
    if (moments.order < 2)
        throw InvalidInput("default_prior needs moments up to order 2");
    if (!(inflation > 1.0))
        throw InvalidInput("prior inflation must exceed 1");
    const double m1 = moments.values[1];
    const double m2 = moments.values[2];
    if (!(m2 > 0.0))
        throw InvalidInput("second moment must be positive");
    // The raw second moment dominates the centered variance; the max is a
    // guard for synthetic input.
    const double variance = inflation * std::max(m2, m2 - m1 * m1);
    return GaussianPrior{m1, std::sqrt(variance)};
}

double eval_prior(const GaussianPrior& prior, double x) {
    const double z = (x - prior.mean) / prior.std_dev;
    return std::exp(-0.5 * z * z) /
           (prior.std_dev * std::sqrt(2.0 * std::numbers::pi));
}

GaussianPrior standardize_prior(const GaussianPrior& prior,
                                const Standardization& st) {
    return GaussianPrior{(prior.mean - st.shift) / st.scale,
                         prior.std_dev / st.scale};
}

}  // namespace momdens
