#pragma once

#include <functional>
#include <span>
#include <vector>

namespace lpfda {

// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(int n);

    // Shared 64-point rule; exact for polynomial integrands up to degree 127.
    static const GaussLegendre& rule64();

    template <class F>
    double integrate(F&& f, double a, double b) const {
        double mid = 0.5 * (a + b);
        double half = 0.5 * (b - a);
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            sum += weights[i] * f(mid + half * nodes[i]);
        return half * sum;
    }
};

// Interval-splitting quadrature; keeps halving until the two-panel estimate
// agrees with the one-panel estimate within abs_tol.
double adaptive_quad(const std::function<double(double)>& f, double a, double b, double abs_tol);

// Composite Simpson on a uniform mesh with `points` nodes (made odd if needed).
double simpson_uniform(const std::function<double(double)>& f, double a, double b, int points);

// Composite Simpson for an irregular sorted mesh; pairs of intervals get the
// three-point quadratic rule, a leftover final interval gets a trapezoid.
double simpson_irregular(std::span<const double> x, std::span<const double> y);

// Weights w such that sum_i w_i y_i == simpson_irregular(x, y).
std::vector<double> simpson_weights(std::span<const double> x);

}  // namespace lpfda
