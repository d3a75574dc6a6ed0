#pragma once

#include <stdexcept>
#include <string>

namespace momdens {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input: too few samples, odd moment order, bad grid sizes,
// unparsable files and the like.
struct InvalidInput : Error {
    using Error::Error;
};

// A sample or an integrand value came out NaN/Inf.
struct NonFiniteValue : Error {
    using Error::Error;
};

// The sample Hankel matrix is not positive definite (all-equal or
// near-collinear samples); the moment problem is unsolvable as posed.
struct DegenerateSamples : Error {
    using Error::Error;
};

// Evaluation of the dual objective/derivatives was requested outside the
// feasible cone (omega not strictly positive on the grid).
struct InfeasiblePoint : Error {
    using Error::Error;
};

// Backtracking could not find an acceptable step.
struct LineSearchStalled : Error {
    using Error::Error;
};

// Iteration cap reached before the stopping tolerances were met.
struct NotConverged : Error {
    NotConverged(const std::string& msg, int iterations, double gradient_norm)
        : Error(msg), iterations(iterations), gradient_norm(gradient_norm) {}
    int iterations;
    double gradient_norm;
};

// KL divergence hit a point where q underflows while p is non-negligible.
struct SupportMismatch : Error {
    using Error::Error;
};

// Max-entropy iteration left the integrable family.
struct NonIntegrable : Error {
    using Error::Error;
};

// Entropy-gap identity produced a meaningfully negative KL, which means the
// two densities do not actually share moments.
struct NegativeKl : Error {
    using Error::Error;
};

// The pre-solve resolution check failed: doubling the panel count moved the
// moment integrals of the reference density by more than the tolerance.
struct GridInsufficient : Error {
    using Error::Error;
};

// A mixture component collapsed onto a single point during EM and re-seeding
// did not recover.
struct CollapsedComponent : Error {
    using Error::Error;
};

}  // namespace momdens
