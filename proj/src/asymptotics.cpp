#include "lpfda/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "lpfda/errors.hpp"
#include "lpfda/quadrature.hpp"

namespace lpfda {

namespace {

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

bool parity_even(int a) { return a % 2 == 0; }

// e_nu' S^{-1} c is exactly zero when p - nu is even (odd kernel moments),
// e_nu' S^{-1} c~ and e_nu' S^{-1} S~ S^{-1} c when p - nu is odd.
double leading_bias_const(const KernelTableau& t, int nu) {
    return parity_even(t.p - nu) ? 0.0 : t.bias_leading_form(nu);
}

// (e_nu' S^{-1} mu)^2 with mu = S e_0, hence exactly delta_{nu,0}; same for
// A2 with mu~ = S e_1 giving delta_{nu,1}.
double star_form(const KernelTableau& t, int nu) {
    return nu == 0 ? t.var_leading_form(0) : 0.0;
}

double mixed_form(const KernelTableau& t, int nu) {
    return nu == 1 ? t.var_mixed_form(1) : 0.0;
}

double clamp_unit_interior(double x) { return std::clamp(x, 1e-6, 1.0 - 1e-6); }

}  // namespace

double bias_curvature_g(const KernelTableau& t, int nu, double m_p1, double m_p2,
                        double f_log_deriv) {
    if (!parity_even(t.p - nu)) return 0.0;
    double c1 = t.bias_second_form(nu);
    double c2 = t.design_form(nu);
    return m_p2 / factorial(t.p + 2) * c1 +
           m_p1 / factorial(t.p + 1) * f_log_deriv * (c1 - c2);
}

MomentExpansion asym_bias(const KernelTableau& t, double m_p1, double m_p2, double f_log_deriv,
                          double h, int nu) {
    if (!(h > 0)) throw Error("asym_bias: h must be positive");
    int p = t.p;
    double nufac = factorial(nu);

    MomentExpansion out;
    out.route = ExpansionRoute::Theorem1;
    out.leading.h_power = p + 1 - nu;
    out.leading.value =
        nufac * m_p1 / factorial(p + 1) * leading_bias_const(t, nu) * std::pow(h, p + 1 - nu);
    out.second.h_power = p + 2 - nu;
    out.second.value =
        nufac * bias_curvature_g(t, nu, m_p1, m_p2, f_log_deriv) * std::pow(h, p + 2 - nu);
    return out;
}

MomentExpansion asym_variance(const KernelTableau& t, const CovarianceModel& model, double x,
                              double h, int n, int nu) {
    if (!(h > 0) || n < 1) throw Error("asym_variance: need h > 0 and n >= 1");
    double nufac2 = factorial(nu) * factorial(nu);

    MomentExpansion out;
    out.route = ExpansionRoute::Theorem1;
    out.leading.h_power = -2 * nu;
    out.leading.n_power = -1;
    out.leading.value = nufac2 * model(x, x) * star_form(t, nu) * std::pow(h, -2 * nu) / n;
    out.second.h_power = 1 - 2 * nu;
    out.second.n_power = -1;
    out.second.value =
        -nufac2 * model.alpha(x) * t.var_roughness_form(nu) * std::pow(h, 1 - 2 * nu) / n;
    return out;
}

MomentExpansion asym_variance_regular(const KernelTableau& t, const CovarianceModel& model,
                                      double x, double h, int n, int nu) {
    if (!(h > 0) || n < 1) throw Error("asym_variance_regular: need h > 0 and n >= 1");
    DiagonalPartials d = model.diagonal_partials(x);
    double nufac2 = factorial(nu) * factorial(nu);

    MomentExpansion out;
    if (nu % 2 == 0) {
        out.route = ExpansionRoute::Theorem2Even;
        out.leading.h_power = -2 * nu;
        out.leading.n_power = -1;
        out.leading.value = nufac2 * model(x, x) * star_form(t, nu) * std::pow(h, -2 * nu) / n;
        out.second.h_power = 2 - 2 * nu;
        out.second.n_power = -1;
        out.second.value =
            nufac2 * d.rho02 * t.var_curvature_form(nu) * std::pow(h, 2 - 2 * nu) / n;
    } else {
        if (!d.rho13)
            throw NotAvailable("asym_variance_regular: rho^(1,3) needs a C4 diagonal");
        out.route = ExpansionRoute::Theorem2Odd;
        out.leading.h_power = 2 - 2 * nu;
        out.leading.n_power = -1;
        out.leading.value =
            nufac2 * d.rho11 * mixed_form(t, nu) * std::pow(h, 2 - 2 * nu) / n;
        out.second.h_power = 4 - 2 * nu;
        out.second.n_power = -1;
        out.second.value =
            nufac2 * *d.rho13 * t.var_mixed4_form(nu) * std::pow(h, 4 - 2 * nu) / n;
    }
    return out;
}

namespace {

void check_hopt_case(int nu, int p) {
    if (nu == 0 && (p == 0 || p == 1 || p == 2)) return;
    if (nu == 1 && (p == 1 || p == 2)) return;
    throw Error("optimal bandwidth implemented for nu=0 (p<=2) and nu=1 (p in {1,2})");
}

}  // namespace

double h_opt_global_from_integrals(const KernelTableau& t, double int_alpha,
                                   double int_deriv_sq, int n, int nu, int p) {
    check_hopt_case(nu, p);
    if (p != t.p) throw Error("h_opt: tableau order does not match p");
    if (!(int_alpha > 0)) throw AlphaZero("h_opt: alpha term must be positive");

    if (nu == 0) {
        double a_form = t.var_roughness_form(0);
        if (!(a_form > 0))
            throw NotOptimizable("h_opt: e0'S^{-1}AS^{-1}e0 is not positive");
        if (p % 2 == 1) {
            if (!(int_deriv_sq > 0))
                throw ZeroCurvature("h_opt: m^(p+1) term vanishes");
            double cl = t.bias_leading_form(0);
            double num = factorial(p + 1) * factorial(p + 1) * a_form * int_alpha;
            double den = (2.0 * p + 2.0) * int_deriv_sq * cl * cl;
            return std::pow(num / den, 1.0 / (2.0 * p + 1.0)) *
                   std::pow(n, -1.0 / (2.0 * p + 1.0));
        }
        // p even: the bias enters through g_{p,0}; with a uniform design
        // g^2 = (e0'S^{-1}c~ / (p+2)!)^2 (m^(p+2))^2.
        double c1 = t.bias_second_form(0) / factorial(p + 2);
        double g2 = c1 * c1 * int_deriv_sq;
        if (!(g2 > 0)) throw OptimalDensityInUse("h_opt: g_{p,0} vanishes");
        double num = a_form * int_alpha;
        double den = (2.0 * p + 4.0) * g2;
        return std::pow(num / den, 1.0 / (2.0 * p + 3.0)) * std::pow(n, -1.0 / (2.0 * p + 3.0));
    }

    // nu = 1, p in {1,2}: exponent 1/5 with the uv-weighted absolute cross moment.
    if (!(int_deriv_sq > 0)) throw ZeroCurvature("h_opt: m^(3) term vanishes");
    double cross = 2.0 * t.A(1, 1);  // iint |u-v| u v K(u) K(v) du dv
    double mu4 = t.mu(4);
    double num = -9.0 * int_alpha * cross;
    if (!(num > 0)) throw NotOptimizable("h_opt: uv-weighted cross moment is not negative");
    double den = 2.0 * mu4 * mu4 * int_deriv_sq;
    return std::pow(num / den, 0.2) * std::pow(n, -0.2);
}

double h_opt_local(const KernelTableau& t, const CovarianceModel& model,
                   const RegressionFunction& truth, double x, int n, int nu, int p) {
    check_hopt_case(nu, p);
    double a = model.alpha(x);
    if (!(a > 1e-14))
        throw AlphaZero("h_opt_local: alpha(x) = 0; use h_opt_regular");

    if (nu == 0 && p % 2 == 0) {
        double g = bias_curvature_g(t, 0, truth.deriv(p + 1, x), truth.deriv(p + 2, x), 0.0);
        if (std::abs(g) < 1e-12) throw OptimalDensityInUse("h_opt_local: g_{p,0}(x) = 0");
        double a_form = t.var_roughness_form(0);
        if (!(a_form > 0)) throw NotOptimizable("h_opt_local: A form not positive");
        double num = a_form * a;
        double den = (2.0 * p + 4.0) * g * g;
        return std::pow(num / den, 1.0 / (2.0 * p + 3.0)) * std::pow(n, -1.0 / (2.0 * p + 3.0));
    }

    int r = nu == 0 ? p + 1 : 3;
    double dr = truth.deriv(r, x);
    if (std::abs(dr) < 1e-10) throw ZeroCurvature("h_opt_local: required derivative vanishes");
    return h_opt_global_from_integrals(t, a, dr * dr, n, nu, p);
}

double h_opt_regular(const KernelTableau& t, const CovarianceModel& model,
                     const RegressionFunction& truth, double x, int n, int nu, int p) {
    check_hopt_case(nu, p);
    DiagonalPartials d = model.diagonal_partials(x);
    if (nu == 0) {
        if (!(d.rho02 < 0))
            throw NotOptimizable("h_opt_regular: rho^(0,2)(x,x) must be negative");
        double m2 = truth.deriv(2, x);
        if (std::abs(m2) < 1e-10) throw ZeroCurvature("h_opt_regular: m''(x) = 0");
        return std::sqrt(-2.0 * d.rho02 / (t.mu(2) * m2 * m2)) / std::sqrt(n);
    }
    if (!d.rho13) throw NotAvailable("h_opt_regular: rho^(1,3) needs a C4 diagonal");
    if (!(*d.rho13 < 0))
        throw NotOptimizable("h_opt_regular: rho^(1,3)(x,x) must be negative");
    double m3 = truth.deriv(3, x);
    if (std::abs(m3) < 1e-10) throw ZeroCurvature("h_opt_regular: m'''(x) = 0");
    return std::sqrt(-6.0 * t.mu(2) * *d.rho13 / (t.mu(4) * m3 * m3)) / std::sqrt(n);
}

double h_opt_global(const KernelTableau& t, const CovarianceModel& model,
                    const RegressionFunction& truth, const std::function<double(double)>& w,
                    int n, int nu, int p, int mesh) {
    check_hopt_case(nu, p);
    auto weight = [&](double x) { return w ? w(x) : 1.0; };
    double int_alpha = simpson_uniform(
        [&](double x) { return model.alpha(clamp_unit_interior(x)) * weight(x); }, 0.0, 1.0,
        mesh);
    int r = nu == 0 ? (p % 2 == 1 ? p + 1 : p + 2) : 3;
    double int_deriv = simpson_uniform(
        [&](double x) {
            double v = truth.deriv(r, x);
            return v * v * weight(x);
        },
        0.0, 1.0, mesh);
    return h_opt_global_from_integrals(t, int_alpha, int_deriv, n, nu, p);
}

bool NormalityParams::decay_satisfied(double n, double h) const {
    return n * std::pow(h, decay_h_exponent) < 1.0;
}

NormalityParams normality_params(const KernelTableau& t, const CovarianceModel& model, double x,
                                 double h, int n, int nu) {
    (void)h;
    (void)n;
    int p = t.p;
    double nufac2 = factorial(nu) * factorial(nu);

    NormalityParams out;
    if (nu % 2 == 0) {
        out.case_tag = "nu-even";
        out.scaling_h_exponent = 2 * nu;
        out.sigma2 = nufac2 * model(x, x) * star_form(t, nu);
        out.decay_h_exponent = p % 2 == 0 ? 2 * p + 4 : 2 * p + 2;
        return out;
    }

    double a = model.smoothness() == DiagSmoothness::Jump ? model.alpha(x) : 0.0;
    if (a > 1e-14) {
        out.case_tag = "nu-odd-alpha-positive";
        out.scaling_h_exponent = 2 * nu - 1;
        out.sigma2 = nufac2 * a * std::abs(t.var_roughness_form(nu));
        out.decay_h_exponent = p % 2 == 0 ? 2 * p + 1 : 2 * p + 3;
        return out;
    }

    DiagonalPartials d = model.diagonal_partials(x);
    if (!d.rho13)
        throw NotAvailable("normality_params: nu odd with alpha = 0 needs a C4 diagonal");
    out.case_tag = "nu-odd-alpha-zero";
    out.scaling_h_exponent = 2 * nu - 2;
    out.sigma2 = nufac2 * d.rho11 * mixed_form(t, nu);
    out.decay_h_exponent = p % 2 == 0 ? 2 * p : 2 * p + 2;
    out.needs_Nh5 = true;
    return out;
}

}  // namespace lpfda
