#include "momdens/sampling.hpp"

#include <cmath>
#include <numbers>

namespace momdens {

namespace {

constexpr double kEulerGamma = 0.5772156649015329;

// zeta(2..8); Gumbel cumulants are kappa_n = (n-1)! zeta(n) scale^n.
constexpr double kZeta[] = {0.0,
                            0.0,
                            1.6449340668482264,   // pi^2/6
                            1.2020569031595943,
                            1.0823232337111382,   // pi^4/90
                            1.0369277551433699,
                            1.0173430619844491,   // pi^6/945
                            1.0083492773819228,
                            1.0040773561979443};  // pi^8/9450

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i)
        f *= i;
    return f;
}

double gaussian_pdf(double x, double loc, double scale) {
    const double z = (x - loc) / scale;
    return std::exp(-0.5 * z * z) / (scale * std::sqrt(2.0 * std::numbers::pi));
}

double laplace_pdf(double x, double loc, double scale) {
    return std::exp(-std::abs(x - loc) / scale) / (2.0 * scale);
}

double gumbel_pdf(double x, double loc, double scale) {
    const double z = (x - loc) / scale;
    return std::exp(-(z + std::exp(-z))) / scale;
}

double gaussian_cdf(double x, double loc, double scale) {
    return 0.5 * std::erfc(-(x - loc) / (scale * std::sqrt(2.0)));
}

double laplace_cdf(double x, double loc, double scale) {
    const double z = (x - loc) / scale;
    return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
}

double gumbel_cdf(double x, double loc, double scale) {
    return std::exp(-std::exp(-(x - loc) / scale));
}

// Central moments (about the component mean) up to `order`.
std::vector<double> central_moments(const MixtureComponent& c, int order) {
    std::vector<double> mu(order + 1, 0.0);
    mu[0] = 1.0;
    switch (c.family) {
        case Family::Gaussian:
            // (k-1)!! sigma^k for even k.
            for (int k = 2; k <= order; k += 2) {
                double dd = 1.0;
                for (int j = k - 1; j > 1; j -= 2)
                    dd *= j;
                mu[k] = dd * std::pow(c.scale, k);
            }
            break;
        case Family::Laplace:
            // E|z|^k = k! scale^k; odd central moments vanish.
            for (int k = 2; k <= order; k += 2)
                mu[k] = factorial(k) * std::pow(c.scale, k);
            break;
        case Family::Gumbel: {
            // From cumulants kappa_n = (n-1)! zeta(n) scale^n, n >= 2.
            std::vector<double> kap(order + 1, 0.0);
            for (int n = 2; n <= order && n <= 8; ++n)
                kap[n] = factorial(n - 1) * kZeta[n] * std::pow(c.scale, n);
            if (order >= 2) mu[2] = kap[2];
            if (order >= 3) mu[3] = kap[3];
            if (order >= 4) mu[4] = kap[4] + 3 * kap[2] * kap[2];
            if (order >= 5) mu[5] = kap[5] + 10 * kap[3] * kap[2];
            if (order >= 6)
                mu[6] = kap[6] + 15 * kap[4] * kap[2] + 10 * kap[3] * kap[3] +
                        15 * std::pow(kap[2], 3);
            if (order >= 7)
                mu[7] = kap[7] + 21 * kap[5] * kap[2] + 35 * kap[4] * kap[3] +
                        105 * kap[3] * kap[2] * kap[2];
            if (order >= 8)
                mu[8] = kap[8] + 28 * kap[6] * kap[2] + 56 * kap[5] * kap[3] +
                        35 * kap[4] * kap[4] + 210 * kap[4] * kap[2] * kap[2] +
                        280 * kap[3] * kap[3] * kap[2] + 105 * std::pow(kap[2], 4);
            break;
        }
    }
    return mu;
}

double component_mean(const MixtureComponent& c) {
    switch (c.family) {
        case Family::Gaussian:
        case Family::Laplace:
            return c.location;
        case Family::Gumbel:
            return c.location + kEulerGamma * c.scale;
    }
    return c.location;
}

}  // namespace

void validate_mixture(const MixtureSpec& spec) {
    if (spec.components.empty())
        throw InvalidInput("mixture has no components");
    double total = 0.0;
    for (const auto& c : spec.components) {
        if (!(c.weight > 0.0))
            throw InvalidInput("mixture weights must be positive");
        if (!(c.scale > 0.0))
            throw InvalidInput("mixture scales must be positive");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw InvalidInput("mixture weights must sum to 1");
}

double eval_mixture(const MixtureSpec& spec, double x) {
    double p = 0.0;
    for (const auto& c : spec.components) {
        switch (c.family) {
            case Family::Gaussian:
                p += c.weight * gaussian_pdf(x, c.location, c.scale);
                break;
            case Family::Laplace:
                p += c.weight * laplace_pdf(x, c.location, c.scale);
                break;
            case Family::Gumbel:
                p += c.weight * gumbel_pdf(x, c.location, c.scale);
                break;
        }
    }
    return p;
}

double mixture_cdf(const MixtureSpec& spec, double x) {
    double f = 0.0;
    for (const auto& c : spec.components) {
        switch (c.family) {
            case Family::Gaussian:
                f += c.weight * gaussian_cdf(x, c.location, c.scale);
                break;
            case Family::Laplace:
                f += c.weight * laplace_cdf(x, c.location, c.scale);
                break;
            case Family::Gumbel:
                f += c.weight * gumbel_cdf(x, c.location, c.scale);
                break;
        }
    }
    return f;
}

std::vector<double> sample_mixture(const MixtureSpec& spec, int m,
                                   std::uint64_t seed) {
    validate_mixture(spec);
    if (m < 1)
        throw InvalidInput("sample count must be positive");

    Rng rng(seed);
    std::vector<double> out;
    out.reserve(m);
    for (int i = 0; i < m; ++i) {
        const double u = rng.uniform01();
        double acc = 0.0;
        const MixtureComponent* chosen = &spec.components.back();
        for (const auto& c : spec.components) {
            acc += c.weight;
            if (u < acc) {
                chosen = &c;
                break;
            }
        }
        double x = 0.0;
        switch (chosen->family) {
            case Family::Gaussian: {
                const double u1 = rng.uniform_open01();
                const double u2 = rng.uniform01();
                const double z = std::sqrt(-2.0 * std::log(u1)) *
                                 std::cos(2.0 * std::numbers::pi * u2);
                x = chosen->location + chosen->scale * z;
                break;
            }
            case Family::Laplace: {
                const double v = rng.uniform_open01() - 0.5;
                const double sign = v < 0.0 ? -1.0 : 1.0;
                x = chosen->location -
                    chosen->scale * sign * std::log(1.0 - 2.0 * std::abs(v));
                break;
            }
            case Family::Gumbel: {
                const double v = rng.uniform_open01();
                x = chosen->location - chosen->scale * std::log(-std::log(v));
                break;
            }
        }
        out.push_back(x);
    }
    return out;
}

MomentSequence mixture_moments(const MixtureSpec& spec, int order) {
    validate_mixture(spec);
    if (order < 2 || order % 2 != 0 || order > 8)
        throw InvalidInput("mixture moments available for even orders 2..8");

    std::vector<std::vector<double>> binom(order + 1);
    for (int i = 0; i <= order; ++i) {
        binom[i].assign(i + 1, 1.0);
        for (int j = 1; j < i; ++j)
            binom[i][j] = binom[i - 1][j - 1] + binom[i - 1][j];
    }

    MomentSequence ms;
    ms.order = order;
    ms.sample_count = 0;
    ms.values.assign(order + 1, 0.0);
    ms.values[0] = 1.0;
    for (const auto& c : spec.components) {
        const auto central = central_moments(c, order);
        const double mean = component_mean(c);
        for (int k = 1; k <= order; ++k) {
            // raw_k = sum_j C(k,j) central_j mean^{k-j}
            double raw = 0.0;
            for (int j = 0; j <= k; ++j)
                raw += binom[k][j] * central[j] * std::pow(mean, k - j);
            ms.values[k] += c.weight * raw;
        }
    }
    return ms;
}

double mixture_mean(const MixtureSpec& spec) {
    return mixture_moments(spec, 2).values[1];
}

double mixture_std(const MixtureSpec& spec) {
    const auto ms = mixture_moments(spec, 2);
    return std::sqrt(ms.values[2] - ms.values[1] * ms.values[1]);
}

BenchmarkCase benchmark_case(int id) {
    switch (id) {
        case 1:
            return BenchmarkCase{
                MixtureSpec{{{Family::Gaussian, 0.5, 2.0, 1.0},
                             {Family::Gaussian, 0.5, -2.0, 1.0}}},
                GaussianPrior{0.0, 6.7}, 4, 100, 50};
        case 2:
            return BenchmarkCase{
                MixtureSpec{{{Family::Gaussian, 0.7, 2.0, 1.0},
                             {Family::Gaussian, 0.3, -2.0, 1.0}}},
                GaussianPrior{-0.7, 6.2}, 4, 100, 50};
        case 3:
            // Printed as 0.5 exp(-2|x -+ 2|), which integrates to 1/2 per
            // component; encoded as proper Laplace(+-2, scale 1/2) densities
            // so the mixture is a density.
            return BenchmarkCase{
                MixtureSpec{{{Family::Laplace, 0.5, 2.0, 0.5},
                             {Family::Laplace, 0.5, -2.0, 0.5}}},
                GaussianPrior{0.0, 6.5}, 4, 200, 50};
        case 4:
            return BenchmarkCase{
                MixtureSpec{{{Family::Gumbel, 0.5, 1.0, 1.0},
                             {Family::Gumbel, 0.5, -1.0, 1.0}}},
                GaussianPrior{0.5, 3.5}, 6, 200, 50};
        case 5:
            return BenchmarkCase{
                MixtureSpec{{{Family::Gaussian, 0.3, 3.0, 1.0},
                             {Family::Gaussian, 0.3, -3.0, 1.0},
                             {Family::Gaussian, 0.4, 1.0, 2.0}}},
                GaussianPrior{0.3, 5.0}, 6, 200, 50};
        default:
            throw InvalidInput("unknown benchmark id (want 1..5)");
    }
}

}  // namespace momdens
