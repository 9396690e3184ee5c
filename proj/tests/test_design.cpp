#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lpfda/asymptotics.hpp"
#include "lpfda/design.hpp"
#include "lpfda/errors.hpp"

using namespace lpfda;

TEST_CASE("uniform quantile grids") {
    DesignGrid g = quantile_grid(SamplingDensity::uniform(), 5);
    REQUIRE(g.size() == 5);
    for (int j = 0; j < 5; ++j) CHECK(g.points[j] == doctest::Approx(0.25 * j).epsilon(1e-15));

    DesignGrid two = quantile_grid(SamplingDensity::uniform(), 2);
    CHECK(two.points.front() == 0.0);
    CHECK(two.points.back() == 1.0);

    CHECK_THROWS_AS(quantile_grid(SamplingDensity::uniform(), 1), Error);
}

TEST_CASE("linear density: closed-form quantiles") {
    // f(t) = (2/3)(1 + t): the middle of three points solves x^2 + 2x = 3/2.
    SamplingDensity f = SamplingDensity::linear(1.0);
    DesignGrid g = quantile_grid(f, 3);
    CHECK(g.points[1] == doctest::Approx(-1.0 + std::sqrt(2.5)).epsilon(1e-12));
    CHECK(g.points[0] == 0.0);
    CHECK(g.points[2] == 1.0);
    CHECK(f.cdf(0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(f.cdf(1.0) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(SamplingDensity::linear(-1.2), BadDensity);
}

TEST_CASE("numeric cdf path: grid satisfies the quantile equation to 1e-9") {
    SamplingDensity f = SamplingDensity::custom(
        "bump", [](double x) { return 1.0 + 0.5 * std::cos(M_PI * x); });
    DesignGrid g = quantile_grid(f, 17);
    for (int j = 0; j < 17; ++j) {
        double target = static_cast<double>(j) / 16.0;
        CHECK(std::abs(f.cdf(g.points[j]) - target) < 1e-9);
        if (j > 0) CHECK(g.points[j] > g.points[j - 1]);
    }

    SamplingDensity neg = SamplingDensity::custom(
        "neg", [](double x) { return 1.0 - 1.5 * x; });
    CHECK_THROWS_AS(quantile_grid(neg, 5), BadDensity);
}

TEST_CASE("grid ingestion rejects unsorted or duplicated points") {
    CHECK_THROWS_AS(make_design_grid({0.0, 0.5, 0.5, 1.0}), Error);
    CHECK_THROWS_AS(make_design_grid({0.0, 0.7, 0.4}), Error);
    CHECK(make_design_grid({0.0, 0.4, 1.0}).size() == 3);
}

TEST_CASE("optimal density: gamma, normalization, degenerate cases") {
    // p = 0, nu = 0: gamma = mu2 / (0 - mu2) = -1 for any kernel.
    const KernelTableau& t0 = tableau(Kernel::epanechnikov(), 0);
    double c1 = t0.bias_second_form(0);
    double gamma = c1 / (t0.design_form(0) - c1);
    CHECK(gamma == doctest::Approx(-1.0).epsilon(1e-12));

    auto mprime = [](double x) { return std::exp(x); };
    SamplingDensity f0 = optimal_density(t0, 0, 0, mprime);
    double mass = 0.0;
    const int mesh = 2001;
    for (int i = 0; i < mesh; ++i) {
        double x = static_cast<double>(i) / (mesh - 1);
        double w = (i == 0 || i == mesh - 1) ? 0.5 : 1.0;
        mass += w * f0.density(x) / (mesh - 1);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(f0.cdf(1.0) - 1.0) < 1e-9);

    // constant m^(p+1) makes f0 uniform
    const KernelTableau& t1 = tableau(Kernel::epanechnikov(), 1);
    SamplingDensity flat = optimal_density(t1, 1, 1, [](double) { return 2.0; });
    for (double x : {0.0, 0.3, 0.9}) CHECK(flat.density(x) == doctest::Approx(1.0).epsilon(1e-9));

    CHECK_THROWS_AS(optimal_density(t1, 0, 1, mprime), WrongParity);
    CHECK_THROWS_AS(optimal_density(t1, 1, 1, [](double x) { return x - 0.5; }),
                    VanishingDerivative);
}

TEST_CASE("the second-order bias coefficient vanishes under the optimal density") {
    // p = 1, nu = 1 with m = exp: m'' = m''' = exp stays away from zero.
    const KernelTableau& t = tableau(Kernel::epanechnikov(), 1);
    auto m2 = [](double x) { return std::exp(x); };
    auto m3 = [](double x) { return std::exp(x); };
    SamplingDensity f0 = optimal_density(t, 1, 1, m2, m3);
    for (int i = 0; i <= 40; ++i) {
        double x = 0.01 + 0.98 * i / 40.0;
        double g = bias_curvature_g(t, 1, m2(x), m3(x), f0.log_derivative(x));
        CHECK(std::abs(g) < 1e-8);
    }
}

TEST_CASE("density parsing") {
    CHECK(SamplingDensity::parse("uniform").density(0.4) == 1.0);
    CHECK(SamplingDensity::parse("linear:1").density(0.0) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK_THROWS_AS(SamplingDensity::parse("beta:2:2"), UnknownId);
}
