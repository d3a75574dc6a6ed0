#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "momdens/moments.hpp"
#include "momdens/rng.hpp"
#include "momdens/sampling.hpp"

#include "oracles.hpp"

using namespace momdens;

TEST_CASE("sample moments of tiny hand samples") {
    const std::vector<double> symmetric{1.0, -1.0};
    const auto ms = compute_sample_moments(symmetric, 2);
    CHECK(ms.values[0] == 1.0);
    CHECK(ms.values[1] == doctest::Approx(0.0));
    CHECK(ms.values[2] == doctest::Approx(1.0));

    const std::vector<double> constant{2.0, 2.0, 2.0};
    const auto mc = compute_sample_moments(constant, 2);
    CHECK(mc.values[1] == doctest::Approx(2.0));
    CHECK(mc.values[2] == doctest::Approx(4.0));
}

TEST_CASE("moments of a large standard normal sample match the population") {
    const MixtureSpec gauss{{{Family::Gaussian, 1.0, 0.0, 1.0}}};
    const auto samples = sample_mixture(gauss, 1000000, 20240501);
    const auto ms = compute_sample_moments(samples, 4);
    const std::vector<double> population{1.0, 0.0, 1.0, 0.0, 3.0};
    for (int k = 0; k <= 4; ++k)
        CHECK(std::abs(ms.values[k] - population[k]) < 0.02);
}

TEST_CASE("moment computation is permutation invariant") {
    Rng rng(11);
    std::vector<double> samples(500);
    for (auto& x : samples)
        x = 10.0 * rng.uniform01() - 5.0;
    const auto original = compute_sample_moments(samples, 6);

    std::vector<double> shuffled = samples;
    std::sort(shuffled.begin(), shuffled.end());
    const auto sorted = compute_sample_moments(shuffled, 6);
    for (int k = 0; k <= 6; ++k)
        CHECK(original.values[k] ==
              doctest::Approx(sorted.values[k]).epsilon(1e-13));
}

TEST_CASE("affine push-forward: direct moments match the binomial transform") {
    Rng rng(12);
    std::vector<double> samples(400);
    for (auto& x : samples)
        x = 3.0 * rng.uniform01() + rng.uniform01();
    const double a = 2.5, b = -1.75;

    std::vector<double> mapped(samples.size());
    std::transform(samples.begin(), samples.end(), mapped.begin(),
                   [&](double x) { return a * x + b; });
    const auto direct = compute_sample_moments(mapped, 6);
    const auto base = compute_sample_moments(samples, 6);

    // Independent binomial expansion E(aX+b)^k = sum C(k,j) a^j b^{k-j} E X^j
    for (int k = 0; k <= 6; ++k) {
        double expected = 0.0;
        for (int j = 0; j <= k; ++j) {
            double binom = 1.0;
            for (int i = 0; i < j; ++i)
                binom = binom * (k - i) / (i + 1);
            expected +=
                binom * std::pow(a, j) * std::pow(b, k - j) * base.values[j];
        }
        CHECK(std::abs(direct.values[k] - expected) <=
              1e-10 * std::max(1.0, std::abs(expected)));
    }
}

TEST_CASE("input validation") {
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(compute_sample_moments(one, 2), InvalidInput);
    const std::vector<double> two{1.0, 2.0};
    CHECK_THROWS_AS(compute_sample_moments(two, 3), InvalidInput);
    CHECK_THROWS_AS(compute_sample_moments(two, 0), InvalidInput);
    const std::vector<double> bad{1.0, std::nan("")};
    CHECK_THROWS_AS(compute_sample_moments(bad, 2), NonFiniteValue);
}

TEST_CASE("Hankel matrices of small sequences") {
    MomentSequence ms{2, {1.0, 0.0, 1.0}, 2};
    auto h = build_hankel(ms);
    CHECK(h.entries(0, 0) == 1.0);
    CHECK(h.entries(0, 1) == 0.0);
    CHECK(h.entries(1, 0) == 0.0);
    CHECK(h.entries(1, 1) == 1.0);

    MomentSequence mc{2, {1.0, 2.0, 4.0}, 3};
    auto hc = build_hankel(mc);
    CHECK(hc.entries(0, 1) == 2.0);
    CHECK(hc.entries(1, 1) == 4.0);

    MomentSequence mn{4, {1.0, 0.0, 1.0, 0.0, 3.0}, 100};
    auto hn = build_hankel(mn);
    CHECK(hn.size() == 3);
    CHECK(hn.entries(2, 2) == 3.0);
    CHECK(hn.entries(0, 2) == 1.0);
    // Hankel structure: entries depend on i+j only
    for (int i = 0; i <= 2; ++i)
        for (int j = 0; j <= 2; ++j)
            CHECK(hn.entries(i, j) == mn.values[i + j]);
}

TEST_CASE("positive definiteness certificates") {
    const HankelMatrix identity = build_hankel({2, {1.0, 0.0, 1.0}, 2});
    const auto cert = certify_positive_definite(identity, 1e-12);
    CHECK(cert.is_pd);
    CHECK(cert.min_eigenvalue == doctest::Approx(1.0));

    // Constant samples give a rank-one matrix.
    const HankelMatrix flat = build_hankel({2, {1.0, 2.0, 4.0}, 3});
    const auto flat_cert =
        certify_positive_definite(flat, default_pd_tolerance(flat));
    CHECK_FALSE(flat_cert.is_pd);
    CHECK(flat_cert.min_eigenvalue == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(require_positive_definite({2, {1.0, 2.0, 4.0}, 3}),
                    DegenerateSamples);

    // Standard normal population moments: eigenvalues are {1, 2 - sqrt(2),
    // 2 + sqrt(2)} from the characteristic polynomial of the 2x2 block.
    const HankelMatrix normal = build_hankel({4, {1.0, 0.0, 1.0, 0.0, 3.0}, 0});
    const auto normal_cert = certify_positive_definite(normal, 1e-12);
    CHECK(normal_cert.is_pd);
    CHECK(normal_cert.min_eigenvalue ==
          doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("samples with two distinct values certify PD up to 2(m-1)") {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 3 + static_cast<int>(rng.uniform01() * 20);
        std::vector<double> samples(m);
        for (auto& x : samples)
            x = rng.uniform01() * 4.0 - 2.0;
        const int max_order = 2 * (m - 1);
        for (int order = 2; order <= std::min(max_order, 8); order += 2) {
            const auto ms = compute_sample_moments(samples, order);
            const auto h = build_hankel(ms);
            CHECK(certify_positive_definite(h, default_pd_tolerance(h)).is_pd);
        }
    }
}

TEST_CASE("standardization produces unit-variance moments") {
    Rng rng(14);
    std::vector<double> samples(300);
    for (auto& x : samples)
        x = 40.0 + 7.0 * (rng.uniform01() + rng.uniform01());
    const auto st = fit_standardization(samples);
    const auto z = apply_standardization(st, samples);
    const auto zm = compute_sample_moments(z, 4);
    CHECK(zm.values[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(zm.values[2] == doctest::Approx(1.0).epsilon(1e-12));

    // transform_moments agrees with recomputing from transformed samples
    const auto raw = compute_sample_moments(samples, 4);
    const auto mapped = transform_moments(raw, st.shift, st.scale);
    for (int k = 0; k <= 4; ++k)
        CHECK(mapped.values[k] ==
              doctest::Approx(zm.values[k]).epsilon(1e-9));
}

TEST_CASE("zero-spread samples cannot be standardized") {
    const std::vector<double> flat{3.0, 3.0, 3.0, 3.0};
    CHECK_THROWS_AS(fit_standardization(flat), DegenerateSamples);
}
