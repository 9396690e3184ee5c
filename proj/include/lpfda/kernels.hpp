#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace lpfda {

enum class KernelId { TruncatedGaussian, Epanechnikov, Uniform, Custom };

// Symmetric density on [-tau, tau]. The truncated Gaussian is the standard
// normal density restricted to [-3, 3] and renormalized, so tau = 3 puts its
// effective spread on the same scale data-side bandwidths expect; the shape
// is configurable through the tau argument ("tgauss:<tau>").
class Kernel {
public:
    static Kernel truncated_gaussian(double tau = 3.0);
    static Kernel epanechnikov();
    static Kernel uniform();
    static Kernel custom(std::string name, double tau, std::function<double(double)> density);

    // Accepts "truncated-gaussian", "tgauss", "tgauss:<tau>", "epanechnikov",
    // "epan", "uniform". Throws UnknownId otherwise.
    static Kernel parse(const std::string& id);

    double operator()(double u) const;
    KernelId id() const { return id_; }
    double tau() const { return tau_; }
    const std::string& name() const { return name_; }
    // Key for the tableau cache; encodes id and tau.
    std::string cache_key() const;

    // Largest slope observed on a fine grid over the open support.
    double lipschitz_bound() const;

private:
    Kernel(KernelId id, std::string name, double tau, std::function<double(double)> f);

    KernelId id_;
    std::string name_;
    double tau_;
    std::function<double(double)> density_;
};

// All kernel-derived constants needed by the expansion and bandwidth
// formulas, for local fits of order p:
//   moments mu_k = int u^k K(u) du,
//   c = (mu_{p+1}..mu_{2p+1}),  c_tilde = (mu_{p+2}..mu_{2p+2}),
//   S = (mu_{k+l}),  S_tilde = (mu_{k+l+1}),  S_star = (mu_k mu_l),
//   A = (1/2 iint |u-v| u^k v^l K(u)K(v) du dv),
//   B = (1/2 (mu_{k+1} mu_l + mu_k mu_{l+1})),
//   A1 = (1/2 (mu_k mu_{l+2} + mu_{k+2} mu_l)),  A2 = (mu_{k+1} mu_{l+1}),
//   A3 = (1/6 (mu_{k+3} mu_{l+1} + mu_{k+1} mu_{l+3})).
// Immutable after construction; shared freely across threads.
struct KernelTableau {
    int p = 0;
    double tau = 1.0;
    std::string kernel_name;
    std::vector<double> moments;  // mu_0 .. mu_max(2p+2, p+3)
    Eigen::VectorXd c, c_tilde;
    Eigen::MatrixXd S, S_tilde, S_star, A, B, A1, A2, A3;
    Eigen::LDLT<Eigen::MatrixXd> S_factor;

    double mu(int k) const { return moments.at(static_cast<std::size_t>(k)); }

    // e_nu' S^{-1} v
    double linear_form(const Eigen::VectorXd& v, int nu) const;
    // e_nu' S^{-1} M S^{-1} e_nu
    double sandwich_form(const Eigen::MatrixXd& M, int nu) const;
    // e_nu' S^{-1} S_tilde S^{-1} c
    double design_form(int nu) const;

    // Named scalar forms as they enter the expansions.
    double bias_leading_form(int nu) const { return linear_form(c, nu); }
    double bias_second_form(int nu) const { return linear_form(c_tilde, nu); }
    double var_leading_form(int nu) const { return sandwich_form(S_star, nu); }
    double var_roughness_form(int nu) const { return sandwich_form(A, nu); }
    double var_curvature_form(int nu) const { return sandwich_form(A1, nu); }
    double var_mixed_form(int nu) const { return sandwich_form(A2, nu); }
    double var_mixed4_form(int nu) const { return sandwich_form(A3, nu); }
};

// kth moment of K over its support; closed form for the built-in kernels,
// adaptive quadrature (abs tol 1e-12) otherwise.
double kernel_moment(const Kernel& kernel, int k);

// Entry of the A matrix: 1/2 iint |u-v| u^k v^l K(u) K(v) du dv. The square
// is split along u = v so the Gauss panels never straddle the |.| kink.
double cross_moment_abs(const Kernel& kernel, int k, int l);

// Same double integral on [-1,1]^2 without the kernel weight; the (1,1)
// entry equals -8/15 exactly and doubles as a quadrature self-test.
double abs_cross_moment_unweighted(int k, int l);

// Builds the full tableau for 0 <= p <= 4. Throws SingularMoments when the
// moment matrix S has condition number above 1e12.
KernelTableau build_tableau(const Kernel& kernel, int p);

// Cached tableau keyed by (kernel id, tau, p); custom kernels bypass the
// cache. Returned reference stays valid for the program lifetime.
const KernelTableau& tableau(const Kernel& kernel, int p);

}  // namespace lpfda
