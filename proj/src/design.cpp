#include "lpfda/design.hpp"

#include <algorithm>
#include <cmath>

#include "lpfda/errors.hpp"
#include "lpfda/quadrature.hpp"

namespace lpfda {

SamplingDensity SamplingDensity::uniform() {
    SamplingDensity d;
    d.name_ = "uniform";
    d.f_ = [](double) { return 1.0; };
    d.fprime_ = [](double) { return 0.0; };
    d.cdf_ = [](double x) { return x; };
    d.linear_a_ = 0.0;
    return d;
}

SamplingDensity SamplingDensity::linear(double a) {
    if (1.0 + std::min(0.0, a) <= 0.0)
        throw BadDensity("linear density: 1 + a t must stay positive on [0,1]");
    SamplingDensity d;
    d.name_ = "linear:" + std::to_string(a);
    double norm = 1.0 + 0.5 * a;
    d.f_ = [a, norm](double x) { return (1.0 + a * x) / norm; };
    d.fprime_ = [a, norm](double) { return a / norm; };
    d.cdf_ = [a, norm](double x) { return (x + 0.5 * a * x * x) / norm; };
    d.linear_a_ = a;
    return d;
}

SamplingDensity SamplingDensity::custom(std::string name, Fn density, Fn derivative, Fn cdf) {
    SamplingDensity d;
    d.name_ = std::move(name);
    d.f_ = std::move(density);
    d.fprime_ = std::move(derivative);
    d.cdf_ = std::move(cdf);
    if (!d.cdf_) d.build_cdf_table();
    return d;
}

SamplingDensity SamplingDensity::parse(const std::string& id) {
    if (id == "uniform") return uniform();
    if (id.rfind("linear:", 0) == 0) return linear(std::stod(id.substr(7)));
    throw UnknownId("unknown density id: " + id);
}

void SamplingDensity::build_cdf_table() {
    // Cumulative quadrature anchors; cdf(x) then only integrates the stub
    // from the nearest anchor below x.
    const int anchors = 512;
    cdf_anchor_.assign(anchors + 1, 0.0);
    const GaussLegendre& g = GaussLegendre::rule64();
    for (int i = 1; i <= anchors; ++i) {
        double a = static_cast<double>(i - 1) / anchors;
        double b = static_cast<double>(i) / anchors;
        cdf_anchor_[i] = cdf_anchor_[i - 1] + g.integrate(f_, a, b);
    }
}

double SamplingDensity::cdf(double x) const {
    if (cdf_) return cdf_(x);
    x = std::clamp(x, 0.0, 1.0);
    int anchors = static_cast<int>(cdf_anchor_.size()) - 1;
    int i = std::min(static_cast<int>(x * anchors), anchors);
    double a = static_cast<double>(i) / anchors;
    return cdf_anchor_[i] + GaussLegendre::rule64().integrate(f_, a, x);
}

double SamplingDensity::derivative(double x) const {
    if (fprime_) return fprime_(x);
    const double s = 1e-5;
    double lo = std::max(0.0, x - s);
    double hi = std::min(1.0, x + s);
    return (f_(hi) - f_(lo)) / (hi - lo);
}

double SamplingDensity::quantile(double q) const {
    if (q <= 0.0) return 0.0;
    if (q >= 1.0) return 1.0;
    if (linear_a_) {
        double a = *linear_a_;
        if (std::abs(a) < 1e-12) return q;
        // (a/2) x^2 + x - q (1 + a/2) = 0, root in [0,1]
        double rhs = q * (1.0 + 0.5 * a);
        return (-1.0 + std::sqrt(1.0 + 2.0 * a * rhs)) / a;
    }

    double lo = 0.0, hi = 1.0, x = q;
    for (int it = 0; it < 200; ++it) {
        double fx = cdf(x) - q;
        if (std::abs(fx) < 1e-13) return x;
        if (fx > 0)
            hi = x;
        else
            lo = x;
        double dfx = f_(x);
        double next = dfx > 0 ? x - fx / dfx : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // Newton left the bracket
        if (std::abs(next - x) < 1e-14 * std::max(1.0, std::abs(x))) return x;
        x = next;
    }
    return x;
}

DesignGrid make_design_grid(std::vector<double> points, std::string density_id) {
    for (std::size_t j = 1; j < points.size(); ++j)
        if (!(points[j] > points[j - 1]))
            throw Error("design grid must be sorted and strictly increasing");
    DesignGrid g;
    g.points = std::move(points);
    g.density_id = std::move(density_id);
    return g;
}

DesignGrid quantile_grid(const SamplingDensity& f, int N) {
    if (N < 2) throw Error("quantile_grid: N must be at least 2");
    const int mesh = 1001;
    for (int i = 0; i < mesh; ++i)
        if (!(f.density(static_cast<double>(i) / (mesh - 1)) > 0.0))
            throw BadDensity("sampling density must be positive on [0,1]");

    DesignGrid g;
    g.density_id = f.name();
    g.points.resize(N);
    for (int j = 0; j < N; ++j)
        g.points[j] = f.quantile(static_cast<double>(j) / (N - 1));
    g.points.front() = 0.0;
    g.points.back() = 1.0;
    return g;
}

SamplingDensity optimal_density(const KernelTableau& t, int nu, int p,
                                std::function<double(double)> m_deriv_p1,
                                std::function<double(double)> m_deriv_p2) {
    if ((p - nu) % 2 != 0)
        throw WrongParity("optimal_density: requires p - nu even; the second-order bias "
                          "term vanishes for any density when p - nu is odd");
    const int mesh = 201;
    for (int i = 0; i < mesh; ++i)
        if (std::abs(m_deriv_p1(static_cast<double>(i) / (mesh - 1))) < 1e-10)
            throw VanishingDerivative("optimal_density: m^(p+1) vanishes on [0,1]");

    double num = t.bias_second_form(nu);
    double den = t.design_form(nu) - t.bias_second_form(nu);
    if (std::abs(den) < 1e-14)
        throw Error("optimal_density: degenerate kernel constants");
    double gamma = num / den;
    double expo = gamma / (p + 2);

    auto shape = [m_deriv_p1, expo](double x) {
        return std::pow(std::abs(m_deriv_p1(x)), expo);
    };
    double d0 = adaptive_quad(shape, 0.0, 1.0, 1e-12);

    SamplingDensity::Fn density = [shape, d0](double x) { return shape(x) / d0; };
    SamplingDensity::Fn deriv = nullptr;
    if (m_deriv_p2) {
        deriv = [density, m_deriv_p1, m_deriv_p2, expo](double x) {
            return density(x) * expo * m_deriv_p2(x) / m_deriv_p1(x);
        };
    }
    return SamplingDensity::custom("optimal", std::move(density), std::move(deriv));
}

}  // namespace lpfda
