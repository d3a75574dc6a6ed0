#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "momdens/baselines.hpp"
#include "momdens/rng.hpp"
#include "momdens/sampling.hpp"

#include "oracles.hpp"

using namespace momdens;

TEST_CASE("a single kernel with unit bandwidth is a standard normal") {
    const KdeModel model{{0.0}, 1.0};
    CHECK(eval_kde(model, 0.0) ==
          doctest::Approx(oracle::normal_pdf(0.0)).epsilon(1e-14));
    for (double x = -3.0; x <= 3.0; x += 0.5)
        CHECK(eval_kde(model, x) ==
              doctest::Approx(oracle::normal_pdf(x)).epsilon(1e-14));
}

TEST_CASE("KDE of symmetric samples is symmetric") {
    const std::vector<double> samples{-1.0, 1.0};
    const KdeModel model{samples, 0.7};
    for (double x = 0.1; x <= 3.0; x += 0.3)
        CHECK(eval_kde(model, x) == doctest::Approx(eval_kde(model, -x)));
}

TEST_CASE("Silverman bandwidth on a large normal sample") {
    const MixtureSpec gauss{{{Family::Gaussian, 1.0, 0.0, 1.0}}};
    const auto samples = sample_mixture(gauss, 1000, 2020);
    const auto model = kde_fit(samples);

    // reproduce the rule independently
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    double mean = 0.0;
    for (double x : samples)
        mean += x;
    mean /= samples.size();
    double ss = 0.0;
    for (double x : samples)
        ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (samples.size() - 1.0));
    const auto quant = [&](double p) {
        const double idx = p * (sorted.size() - 1);
        const auto lo = static_cast<std::size_t>(idx);
        return sorted[lo] * (1.0 - (idx - lo)) + sorted[lo + 1] * (idx - lo);
    };
    const double iqr = quant(0.75) - quant(0.25);
    const double expected =
        0.9 * std::min(sd, iqr / 1.34) * std::pow(1000.0, -0.2);
    CHECK(model.bandwidth == doctest::Approx(expected).epsilon(1e-12));

    // normalization
    const auto grid = build_grid(0.0, 12.0, 48, 16);
    CHECK(integrate([&](double x) { return eval_kde(model, x); }, grid) ==
          doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("KDE equals the direct kernel sum") {
    const MixtureSpec gauss{{{Family::Gaussian, 1.0, 0.5, 1.5}}};
    const auto samples = sample_mixture(gauss, 200, 321);
    const auto model = kde_fit(samples);
    for (double x = -4.0; x <= 5.0; x += 0.7) {
        double direct = 0.0;
        for (double c : samples)
            direct += oracle::normal_pdf(x, c, model.bandwidth);
        direct /= samples.size();
        CHECK(eval_kde(model, x) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("KDE rejects degenerate samples") {
    const std::vector<double> flat{1.0, 1.0, 1.0};
    CHECK_THROWS_AS(kde_fit(flat), DegenerateSamples);
}

TEST_CASE("single-component GMM is the Gaussian MLE") {
    const MixtureSpec gauss{{{Family::Gaussian, 1.0, 2.0, 1.5}}};
    const auto samples = sample_mixture(gauss, 500, 444);
    const auto model = gmm_fit(samples, 1, 99);

    double mean = 0.0;
    for (double x : samples)
        mean += x;
    mean /= samples.size();
    double ss = 0.0;
    for (double x : samples)
        ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / samples.size());  // MLE, 1/m

    CHECK(model.weights[0] == doctest::Approx(1.0));
    CHECK(model.means[0] == doctest::Approx(mean).epsilon(1e-9));
    CHECK(model.std_devs[0] == doctest::Approx(sd).epsilon(1e-9));
}

TEST_CASE("well-separated clusters are recovered") {
    const MixtureSpec two{{{Family::Gaussian, 0.5, 10.0, 0.5},
                           {Family::Gaussian, 0.5, -10.0, 0.5}}};
    const auto samples = sample_mixture(two, 400, 808);
    const auto model = gmm_fit(samples, 2, 17);
    std::vector<double> means = model.means;
    std::sort(means.begin(), means.end());
    CHECK(std::abs(means[0] + 10.0) < 0.2);
    CHECK(std::abs(means[1] - 10.0) < 0.2);
    CHECK(model.weights[0] + model.weights[1] == doctest::Approx(1.0));
}

TEST_CASE("EM log-likelihood trace is non-decreasing") {
    const auto bench = benchmark_case(1);
    const auto samples = sample_mixture(bench.spec, 300, 606);
    std::vector<double> trace;
    GmmOptions opts;
    opts.ll_trace = &trace;
    gmm_fit(samples, 2, 55, opts);
    REQUIRE(trace.size() >= 2);
    for (std::size_t i = 1; i < trace.size(); ++i)
        CHECK(trace[i] >= trace[i - 1] - 1e-9 * std::abs(trace[i - 1]));
}

TEST_CASE("GMM fits are bit-reproducible for a fixed seed") {
    const auto bench = benchmark_case(2);
    const auto samples = sample_mixture(bench.spec, 250, 123);
    const auto a = gmm_fit(samples, 2, 1001);
    const auto b = gmm_fit(samples, 2, 1001);
    CHECK(std::memcmp(a.means.data(), b.means.data(),
                      sizeof(double) * a.means.size()) == 0);
    CHECK(std::memcmp(a.std_devs.data(), b.std_devs.data(),
                      sizeof(double) * a.std_devs.size()) == 0);
    CHECK(std::memcmp(a.weights.data(), b.weights.data(),
                      sizeof(double) * a.weights.size()) == 0);
}

TEST_CASE("pure-atom clusters collapse every restart") {
    std::vector<double> samples;
    for (int i = 0; i < 10; ++i) {
        samples.push_back(0.0);
        samples.push_back(10.0);
    }
    CHECK_THROWS_AS(gmm_fit(samples, 2, 5), CollapsedComponent);
}

TEST_CASE("GMM evaluation of a unit model") {
    const GmmModel model{{1.0}, {0.0}, {1.0}};
    CHECK(eval_gmm(model, 0.0) ==
          doctest::Approx(oracle::normal_pdf(0.0)).epsilon(1e-14));
}

TEST_CASE("KL moment estimate recovers the prior at its own moments") {
    const GaussianPrior prior{0.5, 1.8};
    const auto grid = build_grid(0.5, 12.0 * 1.8, 40, 16);
    const auto moments = oracle::normal_moments(4, 0.5, 1.8);
    const auto estimate = dpmkl_solve({4, moments, 0}, prior, grid);
    CHECK(estimate.diagnostics.converged);
    // omega == 1 via b = (1, 0, ..., 0)
    CHECK(estimate.coeffs.b[0] == doctest::Approx(1.0).epsilon(1e-7));
    for (int k = 1; k <= 4; ++k)
        CHECK(std::abs(estimate.coeffs.b[k]) < 1e-7);
    for (double x = -4.0; x <= 5.0; x += 0.5)
        CHECK(eval_kl_estimate(estimate, x) ==
              doctest::Approx(eval_prior(prior, x)).epsilon(1e-7));
}

TEST_CASE("KL dual gradient matches finite differences") {
    const GaussianPrior prior{0.0, 1.4};
    const auto grid = build_grid(0.0, 12.0 * 1.4, 40, 16);
    const MomentSequence target{2, {1.0, 0.2, 1.1}, 0};

    // evaluate around omega = 1 + small perturbation
    const std::vector<double> b0{1.0, 0.05, 0.02};
    const auto objective = [&](const std::vector<double>& b) {
        double linear = 0.0;
        for (int k = 0; k <= 2; ++k)
            linear += b[k] * target.values[k];
        return linear - integrate(
                            [&](double x) {
                                const double om =
                                    b[0] + b[1] * x + b[2] * x * x;
                                return eval_prior(prior, x) * std::log(om);
                            },
                            grid);
    };
    const auto fd = oracle::fd_gradient(objective, b0, 1e-6);
    // analytic: mu_k - integral x^k r / omega
    for (int k = 0; k <= 2; ++k) {
        const double analytic =
            target.values[k] -
            integrate(
                [&](double x) {
                    const double om = b0[0] + b0[1] * x + b0[2] * x * x;
                    return std::pow(x, k) * eval_prior(prior, x) / om;
                },
                grid);
        CHECK(analytic == doctest::Approx(fd[k]).epsilon(1e-5));
    }
}

TEST_CASE("KL estimate matches bimodal sample moments") {
    const auto bench = benchmark_case(1);
    const auto samples = sample_mixture(bench.spec, 100, 2024);
    FitOptions opts;
    opts.prior = bench.prior;
    const auto estimate = fit_dpmkl(samples, 4, opts);
    CHECK(estimate.diagnostics.converged);
    for (double r : estimate.diagnostics.moment_residuals)
        CHECK(std::abs(r) <= 1e-6);

    const auto grid = grid_for_prior(bench.prior, GridOptions{});
    CHECK(integrate([&](double x) { return eval_kl_estimate(estimate, x); },
                    grid) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("all three baselines integrate to one") {
    const auto bench = benchmark_case(2);
    const auto samples = sample_mixture(bench.spec, 200, 999);
    const auto grid = build_grid(0.0, 40.0, 80, 16);

    const auto kde = kde_fit(samples);
    CHECK(integrate([&](double x) { return eval_kde(kde, x); }, grid) ==
          doctest::Approx(1.0).epsilon(1e-6));

    const auto gmm = gmm_fit(samples, 2, 3);
    CHECK(integrate([&](double x) { return eval_gmm(gmm, x); }, grid) ==
          doctest::Approx(1.0).epsilon(1e-6));

    FitOptions opts;
    opts.prior = bench.prior;
    const auto kl = fit_dpmkl(samples, 4, opts);
    const auto solve_grid = grid_for_prior(bench.prior, GridOptions{});
    CHECK(integrate([&](double x) { return eval_kl_estimate(kl, x); },
                    solve_grid) == doctest::Approx(1.0).epsilon(1e-6));
}
