#include "doctest.h"

#include <cmath>

#include "momdens/metrics.hpp"
#include "momdens/rng.hpp"

#include "oracles.hpp"

using namespace momdens;

namespace {

DensityFn normal(double mean, double sd) {
    return [mean, sd](double x) { return oracle::normal_pdf(x, mean, sd); };
}

}  // namespace

TEST_CASE("cdf table hits known normal quantiles") {
    const auto grid = build_grid(0.0, 12.0, 40, 16);
    const auto table = cdf(normal(0.0, 1.0), grid);
    CHECK(table.at(0.0) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(table.at(1.959964) == doctest::Approx(0.975).epsilon(1e-6));
    CHECK(table.at(-1.959964) == doctest::Approx(0.025).epsilon(1e-6));
    CHECK(table.values.back() == doctest::Approx(1.0).epsilon(1e-6));

    // monotone
    for (std::size_t i = 1; i < table.values.size(); ++i)
        CHECK(table.values[i] >= table.values[i - 1]);
}

TEST_CASE("cdf total mass tracks the density integral") {
    const auto grid = build_grid(0.0, 10.0, 40, 16);
    const DensityFn half = [](double x) {
        return 0.5 * oracle::normal_pdf(x);
    };
    const auto table = cdf(half, grid);
    CHECK(table.total_mass ==
          doctest::Approx(integrate(half, grid)).epsilon(1e-6));
}

TEST_CASE("sup-CDF distance closed forms and ordering") {
    const auto grid = build_grid(1.0, 14.0, 56, 16);
    CHECK(tv_distance(normal(0.0, 1.0), normal(0.0, 1.0), grid) ==
          doctest::Approx(0.0).epsilon(1e-10));
    // sup at the midpoint: 2 Phi(delta/2) - 1
    CHECK(tv_distance(normal(0.0, 1.0), normal(2.0, 1.0), grid) ==
          doctest::Approx(0.6826894921370859).epsilon(1e-6));

    const auto wide = build_grid(1.5, 16.0, 64, 16);
    CHECK(tv_distance(normal(0.0, 1.0), normal(3.0, 1.0), wide) >
          tv_distance(normal(0.0, 1.0), normal(1.0, 1.0), wide));
}

TEST_CASE("KL divergence closed forms") {
    const auto grid = build_grid(0.5, 14.0, 56, 16);
    CHECK(kl_divergence(normal(0.0, 1.0), normal(0.0, 1.0), grid) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(kl_divergence(normal(0.0, 1.0), normal(1.0, 1.0), grid) ==
          doctest::Approx(0.5).epsilon(1e-8));

    // asymmetry witness
    const auto p = normal(0.0, 1.0);
    const auto q = normal(0.0, 2.0);
    CHECK(std::abs(kl_divergence(p, q, grid) - kl_divergence(q, p, grid)) >
          0.05);
}

TEST_CASE("KL divergence is nonnegative across random Gaussian pairs") {
    Rng rng(31);
    for (int trial = 0; trial < 1000; ++trial) {
        const double m1 = 3.0 * rng.uniform01() - 1.5;
        const double m2 = 3.0 * rng.uniform01() - 1.5;
        const double s1 = 0.8 + 1.2 * rng.uniform01();
        const double s2 = 0.8 + 1.2 * rng.uniform01();
        // sized so neither density underflows where the other has mass
        const auto grid =
            build_grid(0.5 * (m1 + m2), 1.5 + 8.0 * std::max(s1, s2), 60, 8);
        CHECK(kl_divergence(normal(m1, s1), normal(m2, s2), grid) >= -1e-10);
    }
}

TEST_CASE("KL reports support mismatches instead of infinities") {
    const auto grid = build_grid(0.0, 50.0, 100, 8);
    const DensityFn spike = [](double x) {
        return oracle::normal_pdf(x, 40.0, 0.5);
    };
    // q underflows to zero 80 sigma away from its mean
    CHECK_THROWS_AS(kl_divergence(spike, normal(0.0, 0.5), grid),
                    SupportMismatch);
}

TEST_CASE("squared Hellinger distance closed forms") {
    const auto grid = build_grid(1.0, 14.0, 56, 16);
    CHECK(hellinger_sq(normal(0.0, 1.0), normal(0.0, 1.0), grid) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(hellinger_sq(normal(0.0, 1.0), normal(2.0, 1.0), grid) ==
          doctest::Approx(0.7869386805747332).epsilon(1e-8));
    // symmetric
    CHECK(hellinger_sq(normal(0.0, 1.0), normal(2.0, 1.0), grid) ==
          doctest::Approx(
              hellinger_sq(normal(2.0, 1.0), normal(0.0, 1.0), grid)));
}

TEST_CASE("widely separated spikes saturate the Hellinger bound") {
    // spikes of width 0.01 at 0 and 100: disjoint supports give
    // integral p + integral q = 2
    const auto grid = build_grid(50.0, 51.0, 10200, 16);
    CHECK(hellinger_sq(normal(0.0, 0.01), normal(100.0, 0.01), grid) ==
          doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("L2 distance against an independent oracle") {
    const auto grid = build_grid(0.0, 14.0, 56, 16);
    CHECK(l2_distance(normal(0.0, 1.0), normal(0.0, 1.0), grid) ==
          doctest::Approx(0.0).epsilon(1e-12));
    // N(0,1) vs N(0, 4): frozen from composite Simpson on [-40, 40]
    CHECK(l2_distance(normal(0.0, 1.0), normal(0.0, 2.0), grid) ==
          doctest::Approx(0.066317364430226).epsilon(1e-8));
    CHECK(l2_distance(normal(0.0, 2.0), normal(0.0, 1.0), grid) ==
          doctest::Approx(l2_distance(normal(0.0, 1.0), normal(0.0, 2.0), grid)));
}

TEST_CASE("metrics are stable under grid refinement") {
    const auto grid = build_grid(0.5, 14.0, 40, 16);
    const auto fine = refine_grid(grid);
    const auto p = normal(0.0, 1.0);
    const auto q = normal(1.0, 1.4);
    CHECK(std::abs(tv_distance(p, q, grid) - tv_distance(p, q, fine)) <= 1e-8);
    CHECK(std::abs(kl_divergence(p, q, grid) - kl_divergence(p, q, fine)) <=
          1e-8);
    CHECK(std::abs(hellinger_sq(p, q, grid) - hellinger_sq(p, q, fine)) <=
          1e-8);
    CHECK(std::abs(l2_distance(p, q, grid) - l2_distance(p, q, fine)) <= 1e-8);
}

TEST_CASE("metric ranges") {
    Rng rng(32);
    for (int trial = 0; trial < 50; ++trial) {
        const double m1 = 6.0 * rng.uniform01() - 3.0;
        const double m2 = 6.0 * rng.uniform01() - 3.0;
        const double s1 = 0.4 + rng.uniform01();
        const double s2 = 0.4 + rng.uniform01();
        const auto grid = build_grid(0.0, 25.0, 80, 8);
        const double h = hellinger_sq(normal(m1, s1), normal(m2, s2), grid);
        CHECK(h >= 0.0);
        CHECK(h <= 2.0 + 1e-12);
        const double tv = tv_distance(normal(m1, s1), normal(m2, s2), grid);
        CHECK(tv >= 0.0);
        CHECK(tv <= 1.0);
    }
}
