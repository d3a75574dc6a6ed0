#include "doctest.h"

#include <cmath>
#include <numbers>

#include "momdens/priors.hpp"
#include "momdens/quadrature.hpp"
#include "momdens/rng.hpp"

#include "oracles.hpp"

using namespace momdens;

TEST_CASE("two-point Gauss rule has nodes at +-1/sqrt(3) with unit weights") {
    const auto grid = build_grid(0.0, 1.0, 1, 2);
    const double node = 1.0 / std::sqrt(3.0);
    CHECK(grid.nodes[0] == doctest::Approx(-node).epsilon(1e-15));
    CHECK(grid.nodes[1] == doctest::Approx(node).epsilon(1e-15));
    CHECK(grid.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(grid.weights[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("grid translates with its center") {
    const auto grid = build_grid(5.0, 1.0, 1, 2);
    const double node = 1.0 / std::sqrt(3.0);
    CHECK(grid.nodes[0] == doctest::Approx(5.0 - node).epsilon(1e-15));
    CHECK(grid.nodes[1] == doctest::Approx(5.0 + node).epsilon(1e-15));
}

TEST_CASE("default-sized grid: 640 nodes, weights sum to the span") {
    const auto grid = build_grid(0.0, 10.0, 40, 16);
    CHECK(grid.nodes.size() == 640);
    double total = 0.0;
    for (double w : grid.weights)
        total += w;
    CHECK(total == doctest::Approx(20.0).epsilon(1e-13));

    // nodes strictly increasing, weights positive
    for (std::size_t i = 0; i + 1 < grid.nodes.size(); ++i)
        CHECK(grid.nodes[i] < grid.nodes[i + 1]);
    for (double w : grid.weights)
        CHECK(w > 0.0);
}

TEST_CASE("integrate: constants, normal density, odd integrand") {
    const auto grid = build_grid(0.0, 10.0, 40, 16);
    CHECK(integrate([](double) { return 1.0; }, grid) ==
          doctest::Approx(20.0).epsilon(1e-13));
    CHECK(integrate([](double x) { return oracle::normal_pdf(x); }, grid) ==
          doctest::Approx(1.0).epsilon(1e-13));
    CHECK(integrate([](double x) { return x * oracle::normal_pdf(x); }, grid) ==
          doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("per-panel exactness for polynomials of degree 2k-1") {
    Rng rng(7);
    for (int npp : {2, 4, 8, 16}) {
        const auto grid = build_grid(0.3, 2.0, 5, npp);
        const int degree = 2 * npp - 1;
        std::vector<double> coeffs(degree + 1);
        for (auto& c : coeffs)
            c = 2.0 * rng.uniform01() - 1.0;

        const auto poly = [&](double x) {
            double v = 0.0;
            for (int k = degree; k >= 0; --k)
                v = v * x + coeffs[k];
            return v;
        };
        // Analytic antiderivative evaluated at the span ends.
        const auto antiderivative = [&](double x) {
            double v = 0.0;
            for (int k = degree; k >= 0; --k)
                v = v * x + coeffs[k] / (k + 1);
            return v * x;
        };
        const double expected = antiderivative(2.3) - antiderivative(-1.7);
        CHECK(integrate(poly, grid) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("doubling panels leaves smooth estimator integrands unchanged") {
    // Integrands of the solve: r/omega, r/omega^2, x^k r/omega^2.
    const GaussianPrior prior{0.0, 2.0};
    const auto omega = [](double x) { return 1.0 + 0.05 * x * x; };
    const auto grid = build_grid(0.0, 24.0, 40, 16);
    const auto fine = refine_grid(grid);
    CHECK(fine.panels == 80);

    const auto check = [&](const std::function<double(double)>& f) {
        CHECK(std::abs(integrate(f, grid) - integrate(f, fine)) <= 1e-10);
    };
    check([&](double x) { return eval_prior(prior, x) / omega(x); });
    check([&](double x) { return eval_prior(prior, x) / (omega(x) * omega(x)); });
    for (int k = 1; k <= 6; ++k)
        check([&, k](double x) {
            return std::pow(x, k) * eval_prior(prior, x) / (omega(x) * omega(x));
        });
}

TEST_CASE("invalid grid parameters are rejected") {
    CHECK_THROWS_AS(build_grid(0.0, 0.0, 1, 2), InvalidInput);
    CHECK_THROWS_AS(build_grid(0.0, 1.0, 0, 2), InvalidInput);
    CHECK_THROWS_AS(build_grid(0.0, 1.0, 1, 1), InvalidInput);
    CHECK_THROWS_AS(build_grid(0.0, 1.0, 1, 65), InvalidInput);
}

TEST_CASE("non-finite integrand values are reported") {
    const auto grid = build_grid(0.0, 1.0, 1, 4);
    CHECK_THROWS_AS(integrate([](double x) { return 1.0 / (x - x); }, grid),
                    NonFiniteValue);
}

TEST_CASE("transform_grid maps nodes and weights through the affine map") {
    const auto grid = build_grid(3.0, 6.0, 10, 8);
    const auto z = transform_grid(grid, 3.0, 2.0);
    CHECK(z.center == doctest::Approx(0.0));
    CHECK(z.half_width == doctest::Approx(3.0));
    // integral of f(z) dz equals integral of f((x-3)/2) dx / 2
    const double direct =
        integrate([](double t) { return t * t; }, z);
    const double mapped = integrate(
        [](double x) {
            const double t = (x - 3.0) / 2.0;
            return t * t / 2.0;
        },
        grid);
    CHECK(direct == doctest::Approx(mapped).epsilon(1e-14));
}
