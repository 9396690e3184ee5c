#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lpfda/kernels.hpp"

namespace lpfda {

// Positive density on [0,1] whose quantiles place the observation times.
class SamplingDensity {
public:
    using Fn = std::function<double(double)>;

    static SamplingDensity uniform();
    // f(t) proportional to 1 + a t; requires 1 + a t > 0 on [0,1].
    static SamplingDensity linear(double a);
    // Evaluator-only density; the cdf is built by quadrature when absent and
    // the derivative falls back to central differences (step 1e-5).
    static SamplingDensity custom(std::string name, Fn density, Fn derivative = nullptr,
                                  Fn cdf = nullptr);

    // "uniform" | "linear:<a>"
    static SamplingDensity parse(const std::string& id);

    const std::string& name() const { return name_; }
    double density(double x) const { return f_(x); }
    double cdf(double x) const;
    bool has_derivative() const { return static_cast<bool>(fprime_); }
    double derivative(double x) const;
    double log_derivative(double x) const { return derivative(x) / f_(x); }
    // Solves F(x) = q on [0,1] by bisection with Newton polish, to 1e-12;
    // closed form for uniform and linear.
    double quantile(double q) const;

private:
    SamplingDensity() = default;
    void build_cdf_table();

    std::string name_;
    Fn f_, fprime_, cdf_;
    std::optional<double> linear_a_;
    std::vector<double> cdf_anchor_;  // cumulative values on a uniform anchor mesh
};

struct DesignGrid {
    std::vector<double> points;
    std::string density_id = "uniform";

    int size() const { return static_cast<int>(points.size()); }
};

// Validates ordering; throws Error on unsorted or duplicated points.
DesignGrid make_design_grid(std::vector<double> points, std::string density_id = "custom");

// Grid of N regularly spaced quantiles: F(x_j) = (j-1)/(N-1), j = 1..N.
// Throws BadDensity if f is nonpositive anywhere on the evaluation mesh.
DesignGrid quantile_grid(const SamplingDensity& f, int N);

// Bias-optimal density f0 = d0^{-1} |m^(p+1)|^{gamma/(p+2)} with gamma
// computed from the kernel tableau. Requires p - nu even (WrongParity
// otherwise) and m^(p+1) bounded away from zero on a 201-point mesh
// (VanishingDerivative otherwise).
SamplingDensity optimal_density(const KernelTableau& t, int nu, int p,
                                std::function<double(double)> m_deriv_p1,
                                std::function<double(double)> m_deriv_p2 = nullptr);

}  // namespace lpfda
