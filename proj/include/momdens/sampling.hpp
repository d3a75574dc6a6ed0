#pragma once

#include <cstdint>
#include <vector>

#include "momdens/moments.hpp"
#include "momdens/priors.hpp"
#include "momdens/rng.hpp"

namespace momdens {

enum class Family { Gaussian, Laplace, Gumbel };

struct MixtureComponent {
    Family family = Family::Gaussian;
    double weight = 1.0;
    double location = 0.0;
    double scale = 1.0;  // std dev (Gaussian) or the family scale parameter
};

// Ground-truth density for the benchmark experiments. Weights must sum to 1.
struct MixtureSpec {
    std::vector<MixtureComponent> components;
};

void validate_mixture(const MixtureSpec& spec);

double eval_mixture(const MixtureSpec& spec, double x);

double mixture_cdf(const MixtureSpec& spec, double x);

// i.i.d. draws, bit-reproducible for a fixed (spec, m, seed). Component
// choice is inverse-CDF on one uniform; Gaussian draws use Box-Muller,
// Laplace and Gumbel use their inverse CDFs.
std::vector<double> sample_mixture(const MixtureSpec& spec, int m,
                                   std::uint64_t seed);

// Population raw moments up to `order` (<= 8), from closed-form central
// moments of each family.
MomentSequence mixture_moments(const MixtureSpec& spec, int order);

double mixture_mean(const MixtureSpec& spec);
double mixture_std(const MixtureSpec& spec);

// Benchmark configurations 1..5: mixture, reference density, moment order,
// per-run sample count, Monte Carlo repetition count.
struct BenchmarkCase {
    MixtureSpec spec;
    GaussianPrior prior;
    int order = 4;
    int sample_count = 100;
    int mc_runs = 50;
};

BenchmarkCase benchmark_case(int id);

}  // namespace momdens
