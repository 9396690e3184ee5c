#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lpfda/errors.hpp"
#include "lpfda/kernels.hpp"
#include "lpfda/quadrature.hpp"
#include "lpfda/rng.hpp"

using namespace lpfda;

namespace {

std::vector<Kernel> builtin_kernels() {
    return {Kernel::truncated_gaussian(), Kernel::epanechnikov(), Kernel::uniform()};
}

// Quadrature route independent of the closed forms used by kernel_moment.
double moment_by_quadrature(const Kernel& k, int order) {
    return adaptive_quad([&](double u) { return std::pow(u, order) * k(u); }, -k.tau(), k.tau(),
                         1e-13);
}

}  // namespace

TEST_CASE("density axioms hold for every built-in kernel") {
    for (const Kernel& k : builtin_kernels()) {
        CAPTURE(k.name());
        double mass = adaptive_quad([&](double u) { return k(u); }, -k.tau(), k.tau(), 1e-12);
        CHECK(std::abs(mass - 1.0) < 1e-10);
        CHECK(k(k.tau() + 1e-9) == 0.0);
        CHECK(k(-k.tau() - 0.5) == 0.0);
        for (int i = 0; i <= 100; ++i) {
            double u = -k.tau() + 2.0 * k.tau() * i / 100.0;
            CHECK(k(u) >= 0.0);
            CHECK(k(u) == doctest::Approx(k(-u)).epsilon(1e-14));
        }
    }
}

TEST_CASE("Lipschitz bound is finite and valid on a grid") {
    for (const Kernel& k : builtin_kernels()) {
        double L = k.lipschitz_bound();
        CHECK(std::isfinite(L));
        const int grid = 257;
        for (int i = 0; i + 1 < grid; ++i) {
            double u = -k.tau() + 2.0 * k.tau() * i / (grid - 1);
            double v = -k.tau() + 2.0 * k.tau() * (i + 1) / (grid - 1);
            CHECK(std::abs(k(u) - k(v)) <= (L + 1e-9) * (v - u) + 1e-12);
        }
    }
}

TEST_CASE("moments: normalization, symmetry, closed forms") {
    for (const Kernel& k : builtin_kernels()) {
        CAPTURE(k.name());
        CHECK(kernel_moment(k, 0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(kernel_moment(k, 1) == 0.0);
        for (int order = 3; order <= 11; order += 2)
            CHECK(std::abs(kernel_moment(k, order)) < 1e-12);
        for (int order = 0; order <= 10; ++order)
            CHECK(kernel_moment(k, order) ==
                  doctest::Approx(moment_by_quadrature(k, order)).epsilon(1e-10));
    }

    Kernel epan = Kernel::epanechnikov();
    CHECK(kernel_moment(epan, 2) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(kernel_moment(epan, 4) == doctest::Approx(3.0 / 35.0).epsilon(1e-14));

    // Custom kernels go through quadrature only.
    Kernel tri = Kernel::custom(
        "triangular", 1.0, [](double u) { return std::abs(u) > 1 ? 0.0 : 1.0 - std::abs(u); });
    CHECK(kernel_moment(tri, 2) == doctest::Approx(1.0 / 6.0).epsilon(1e-10));
    CHECK(std::abs(kernel_moment(tri, 3)) < 1e-12);
}

TEST_CASE("unweighted |u-v| cross moment reproduces -8/15") {
    CHECK(std::abs(abs_cross_moment_unweighted(1, 1) + 8.0 / 15.0) < 1e-9);
    CHECK(abs_cross_moment_unweighted(0, 0) == doctest::Approx(8.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("cross_moment_abs: nonnegativity, symmetry, Monte Carlo oracle") {
    for (const Kernel& k : builtin_kernels()) {
        CHECK(cross_moment_abs(k, 0, 0) >= 0.0);
        CHECK(cross_moment_abs(k, 2, 1) ==
              doctest::Approx(cross_moment_abs(k, 1, 2)).epsilon(1e-11));
    }

    // Independent Monte Carlo route for the epanechnikov (1,1) entry:
    // rejection sampling from the kernel, 1e7 pairs.
    Kernel epan = Kernel::epanechnikov();
    double quad = cross_moment_abs(epan, 1, 1);
    Rng rng(912837);
    auto draw = [&]() {
        for (;;) {
            double u = 2.0 * rng.uniform01() - 1.0;
            if (rng.uniform01() * 0.75 <= epan(u)) return u;
        }
    };
    const long samples = 10'000'000;
    double sum = 0.0, sum2 = 0.0;
    for (long i = 0; i < samples; ++i) {
        double u = draw(), v = draw();
        double g = 0.5 * std::abs(u - v) * u * v;
        sum += g;
        sum2 += g * g;
    }
    double mc = sum / samples;
    double se = std::sqrt((sum2 / samples - mc * mc) / samples);
    CHECK(std::abs(mc - quad) < std::max(4.0 * se, 1e-12));
    CHECK(se < 5e-5);  // resolution for three significant digits
}

TEST_CASE("tableau hand values for the epanechnikov at p = 1") {
    const KernelTableau& t = tableau(Kernel::epanechnikov(), 1);
    CHECK(t.S(0, 0) == 1.0);
    CHECK(t.S(0, 1) == 0.0);
    CHECK(t.S(1, 0) == 0.0);
    CHECK(t.S(1, 1) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(t.c[0] == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(t.c[1] == 0.0);
    CHECK(t.bias_leading_form(0) == doctest::Approx(0.2).epsilon(1e-12));
    // A(0,0) = E|U-V|/2 with E|U-V| = 18/35 for this kernel
    CHECK(t.A(0, 0) == doctest::Approx(9.0 / 35.0).epsilon(1e-9));
}

TEST_CASE("structural quadratic forms: S* and A2 sandwiches") {
    for (const Kernel& k : builtin_kernels()) {
        for (int p = 1; p <= 4; ++p) {
            const KernelTableau& t = tableau(k, p);
            // S* = mu mu' with mu = S e_0, A2 = mu~ mu~' with mu~ = S e_1.
            CHECK(t.var_leading_form(0) == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(t.var_mixed_form(1) == doctest::Approx(1.0).epsilon(1e-10));
            for (int nu = 1; nu <= p; ++nu) CHECK(std::abs(t.var_leading_form(nu)) < 1e-10);
        }
    }
}

TEST_CASE("parity sparsity of the moment matrices") {
    for (const Kernel& k : builtin_kernels()) {
        for (int p = 0; p <= 4; ++p) {
            const KernelTableau& t = tableau(k, p);
            for (int a = 0; a <= p; ++a)
                for (int b = 0; b <= p; ++b) {
                    if ((a + b) % 2 == 1) CHECK(std::abs(t.S(a, b)) < 1e-12);
                    if ((a + b) % 2 == 0) CHECK(std::abs(t.S_tilde(a, b)) < 1e-12);
                    if (a % 2 == b % 2) CHECK(std::abs(t.B(a, b)) < 1e-12);
                    CHECK(t.S(a, b) == t.S(b, a));
                    CHECK(t.A(a, b) == t.A(b, a));
                    CHECK(t.A1(a, b) == t.A1(b, a));
                    CHECK(t.A3(a, b) == t.A3(b, a));
                }
        }
    }
}

TEST_CASE("sparsity forms from the variance expansion vanish for all nu <= p <= 4") {
    for (const Kernel& k : builtin_kernels()) {
        for (int p = 0; p <= 4; ++p) {
            const KernelTableau& t = tableau(k, p);
            for (int nu = 0; nu <= p; ++nu) {
                Eigen::VectorXd e = Eigen::VectorXd::Zero(p + 1);
                e[nu] = 1.0;
                Eigen::VectorXd y = t.S_factor.solve(e);
                Eigen::VectorXd z = t.S_factor.solve(t.S_star * y);
                CHECK(std::abs(y.dot(t.S_tilde * z)) < 1e-10);   // e'S^-1 S~ S^-1 S* S^-1 e
                CHECK(std::abs(t.sandwich_form(t.B, nu)) < 1e-10);
            }
        }
    }
}

TEST_CASE("roughness form signs checked for p <= 2") {
    for (const Kernel& k : builtin_kernels()) {
        for (int p = 0; p <= 2; ++p) CHECK(tableau(k, p).var_roughness_form(0) > 0.0);
        CHECK(tableau(k, 1).A(1, 1) < 0.0);
    }
}

TEST_CASE("truncated gaussian parameterization") {
    Kernel tg = Kernel::truncated_gaussian();
    CHECK(tg.tau() == 3.0);
    // second moment of the standard normal restricted to [-3, 3]
    double z = std::erf(3.0 / std::sqrt(2.0));
    double expected = 1.0 - 2.0 * 3.0 * (0.3989422804014327 * std::exp(-4.5)) / z;
    CHECK(kernel_moment(tg, 2) == doctest::Approx(expected).epsilon(1e-12));

    Kernel narrow = Kernel::parse("tgauss:1");
    CHECK(narrow.tau() == 1.0);
    CHECK(kernel_moment(narrow, 2) == doctest::Approx(0.29110).epsilon(1e-4));
    CHECK(Kernel::parse("truncated-gaussian").tau() == 3.0);
}

TEST_CASE("tableau cache and failure modes") {
    const KernelTableau& a = tableau(Kernel::epanechnikov(), 2);
    const KernelTableau& b = tableau(Kernel::epanechnikov(), 2);
    CHECK(&a == &b);

    CHECK_THROWS_AS(build_tableau(Kernel::epanechnikov(), 5), Error);
    CHECK_THROWS_AS((void)Kernel::parse("box"), UnknownId);

    // Mass concentrated on a tiny support makes the higher-order moment
    // matrix numerically singular.
    Kernel spike =
        Kernel::custom("spike", 0.02, [](double u) { return std::abs(u) > 0.02 ? 0.0 : 25.0; });
    CHECK_THROWS_AS(build_tableau(spike, 4), SingularMoments);
}
