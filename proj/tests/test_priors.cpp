#include "doctest.h"

#include <cmath>
#include <numbers>

#include "momdens/priors.hpp"
#include "momdens/quadrature.hpp"
#include "momdens/rng.hpp"
#include "momdens/sampling.hpp"

using namespace momdens;

TEST_CASE("default prior from standardized and shifted moments") {
    const auto unit = default_prior({2, {1.0, 0.0, 1.0}, 0}, 4.0);
    CHECK(unit.mean == doctest::Approx(0.0));
    CHECK(unit.std_dev == doctest::Approx(2.0));

    const auto shifted = default_prior({2, {1.0, 2.0, 5.0}, 0}, 4.0);
    CHECK(shifted.mean == doctest::Approx(2.0));
    CHECK(shifted.std_dev == doctest::Approx(std::sqrt(20.0)));
}

TEST_CASE("benchmark reference densities") {
    CHECK(benchmark_case(1).prior.mean == doctest::Approx(0.0));
    CHECK(benchmark_case(1).prior.std_dev == doctest::Approx(6.7));
    CHECK(benchmark_case(2).prior.mean == doctest::Approx(-0.7));
    CHECK(benchmark_case(2).prior.std_dev == doctest::Approx(6.2));
    CHECK(benchmark_case(3).prior.std_dev == doctest::Approx(6.5));
    CHECK(benchmark_case(4).prior.mean == doctest::Approx(0.5));
    CHECK(benchmark_case(4).prior.std_dev == doctest::Approx(3.5));
    CHECK(benchmark_case(5).prior.mean == doctest::Approx(0.3));
    CHECK(benchmark_case(5).prior.std_dev == doctest::Approx(5.0));
}

TEST_CASE("prior evaluation") {
    const GaussianPrior unit{0.0, 1.0};
    CHECK(eval_prior(unit, 0.0) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)));
    CHECK(eval_prior(unit, 1.3) == doctest::Approx(eval_prior(unit, -1.3)));

    const GaussianPrior wide{2.0, 3.0};
    CHECK(eval_prior(wide, 2.0) ==
          doctest::Approx(1.0 / (3.0 * std::sqrt(2.0 * std::numbers::pi))));
}

TEST_CASE("prior integrates to one on its default grid") {
    const GaussianPrior prior{1.5, 2.5};
    const auto grid = build_grid(prior.mean, 12.0 * prior.std_dev, 40, 16);
    CHECK(integrate([&](double x) { return eval_prior(prior, x); }, grid) ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("default prior variance strictly exceeds the second moment") {
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const double m1 = 10.0 * rng.uniform01() - 5.0;
        const double var = 0.01 + 5.0 * rng.uniform01();
        const double m2 = var + m1 * m1;
        const auto prior =
            default_prior({2, {1.0, m1, m2}, 0}, 1.0 + 3.0 * rng.uniform01());
        CHECK(prior.std_dev * prior.std_dev > m2);
    }
}

TEST_CASE("invalid prior inputs are rejected") {
    CHECK_THROWS_AS(default_prior({2, {1.0, 0.0, -1.0}, 0}, 4.0), InvalidInput);
    CHECK_THROWS_AS(default_prior({2, {1.0, 0.0, 1.0}, 0}, 1.0), InvalidInput);
}

TEST_CASE("standardize_prior maps through the affine change of variables") {
    const GaussianPrior prior{6.0, 4.0};
    const Standardization st{2.0, 2.0};
    const auto z = standardize_prior(prior, st);
    CHECK(z.mean == doctest::Approx(2.0));
    CHECK(z.std_dev == doctest::Approx(2.0));
}
