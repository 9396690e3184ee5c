#pragma once

#include <functional>
#include <string>

#include "lpfda/covariance.hpp"
#include "lpfda/kernels.hpp"
#include "lpfda/regression.hpp"

namespace lpfda {

// One term of an expansion, evaluated at concrete (h, n) but carrying its
// exponent pair. Terms whose kernel constants vanish structurally (parity of
// the moments, or S^{-1} mu = e_0) are stored as exact zeros.
struct ExpansionTerm {
    double value = 0.0;
    int h_power = 0;
    int n_power = 0;
};

enum class ExpansionRoute { Theorem1, Theorem2Even, Theorem2Odd };

struct MomentExpansion {
    ExpansionTerm leading;
    ExpansionTerm second;
    ExpansionRoute route = ExpansionRoute::Theorem1;

    double total() const { return leading.value + second.value; }
};

// g_{p,nu}: the second-order bias coefficient,
//   m^(p+2)/(p+2)! e'S^{-1}c~  +  m^(p+1)/(p+1)! (f'/f) (e'S^{-1}c~ - e'S^{-1}S~S^{-1}c).
// Identically zero when p - nu is odd.
double bias_curvature_g(const KernelTableau& t, int nu, double m_p1, double m_p2,
                        double f_log_deriv);

// Bias expansion: nu! m^(p+1)/(p+1)! (e'S^{-1}c) h^{p+1-nu}  +  nu! g h^{p+2-nu}.
MomentExpansion asym_bias(const KernelTableau& t, double m_p1, double m_p2, double f_log_deriv,
                          double h, int nu);

// Variance expansion under the jump route:
//   (nu!)^2 rho(x,x) (e'S^{-1}S*S^{-1}e) / (n h^{2nu})
//   - (nu!)^2 alpha(x) (e'S^{-1}AS^{-1}e) / (n h^{2nu-1}).
MomentExpansion asym_variance(const KernelTableau& t, const CovarianceModel& model, double x,
                              double h, int n, int nu);

// Variance expansion for a covariance smooth on the diagonal (equidistant
// design). nu even uses rho^(0,2) and A1; nu odd uses rho^(1,1), rho^(1,3)
// with A2, A3. Throws NotAvailable when the partials are missing.
MomentExpansion asym_variance_regular(const KernelTableau& t, const CovarianceModel& model,
                                      double x, double h, int n, int nu);

// Pointwise MSE-optimal bandwidth for nu in {0,1}, p <= 2, alpha(x) > 0.
double h_opt_local(const KernelTableau& t, const CovarianceModel& model,
                   const RegressionFunction& truth, double x, int n, int nu, int p);

// Smooth-diagonal variant: needs rho^(0,2)(x,x) < 0 (nu = 0) or
// rho^(1,3)(x,x) < 0 (nu = 1); throws NotOptimizable otherwise.
double h_opt_regular(const KernelTableau& t, const CovarianceModel& model,
                     const RegressionFunction& truth, double x, int n, int nu, int p);

// Global bandwidth: alpha and the squared regression derivative replaced by
// their w-weighted integrals (composite Simpson, `mesh` points).
double h_opt_global(const KernelTableau& t, const CovarianceModel& model,
                    const RegressionFunction& truth, const std::function<double(double)>& w,
                    int n, int nu, int p, int mesh = 201);

// Same formulas from precomputed integrals; also the entry point for the
// data-driven plug-in.
double h_opt_global_from_integrals(const KernelTableau& t, double int_alpha,
                                   double int_deriv_sq, int n, int nu, int p);

// Parameters of the limiting normal law: sqrt(n h^r) (est - truth) -> N(0, sigma2),
// with the bandwidth-decay condition n h^e -> 0 recorded as a checkable predicate.
struct NormalityParams {
    int scaling_h_exponent = 0;  // r in sqrt(n h^r)
    double sigma2 = 0.0;
    int decay_h_exponent = 0;    // e in the condition n h^e -> 0
    bool needs_Nh5 = false;      // smooth-diagonal odd case also needs N h^5 -> inf
    std::string case_tag;        // "nu-even" | "nu-odd-alpha-positive" | "nu-odd-alpha-zero"

    bool decay_satisfied(double n, double h) const;
};

NormalityParams normality_params(const KernelTableau& t, const CovarianceModel& model, double x,
                                 double h, int n, int nu);

}  // namespace lpfda
