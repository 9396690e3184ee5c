#include "lpfda/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace lpfda {

GaussLegendre::GaussLegendre(int n) {
    nodes.resize(n);
    weights.resize(n);
    // Newton iteration on P_n, seeded with the Chebyshev approximation.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

const GaussLegendre& GaussLegendre::rule64() {
    static const GaussLegendre rule(64);
    return rule;
}

namespace {

double adaptive_rec(const std::function<double(double)>& f, double a, double b, double whole,
                    double abs_tol, int depth) {
    const GaussLegendre& g = GaussLegendre::rule64();
    double mid = 0.5 * (a + b);
    double left = g.integrate(f, a, mid);
    double right = g.integrate(f, mid, b);
    if (depth > 40 || std::abs(left + right - whole) < abs_tol) return left + right;
    return adaptive_rec(f, a, mid, left, 0.5 * abs_tol, depth + 1) +
           adaptive_rec(f, mid, b, right, 0.5 * abs_tol, depth + 1);
}

}  // namespace

double adaptive_quad(const std::function<double(double)>& f, double a, double b, double abs_tol) {
    if (a == b) return 0.0;
    double whole = GaussLegendre::rule64().integrate(f, a, b);
    return adaptive_rec(f, a, b, whole, abs_tol, 0);
}

double simpson_uniform(const std::function<double(double)>& f, double a, double b, int points) {
    if (points < 3) points = 3;
    if (points % 2 == 0) ++points;
    double h = (b - a) / (points - 1);
    double sum = f(a) + f(b);
    for (int i = 1; i < points - 1; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

std::vector<double> simpson_weights(std::span<const double> x) {
    std::size_t n = x.size();
    std::vector<double> w(n, 0.0);
    if (n < 2) return w;
    std::size_t i = 0;
    while (i + 2 < n) {
        double h1 = x[i + 1] - x[i];
        double h2 = x[i + 2] - x[i + 1];
        double s = h1 + h2;
        // Exact integral of the quadratic through the three nodes.
        w[i] += s * (2.0 * h1 - h2) / (6.0 * h1);
        w[i + 1] += s * s * s / (6.0 * h1 * h2);
        w[i + 2] += s * (2.0 * h2 - h1) / (6.0 * h2);
        i += 2;
    }
    if (i + 1 < n) {
        double h = x[i + 1] - x[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    return w;
}

double simpson_irregular(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("simpson_irregular: size mismatch");
    std::vector<double> w = simpson_weights(x);
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * y[i];
    return sum;
}

}  // namespace lpfda
