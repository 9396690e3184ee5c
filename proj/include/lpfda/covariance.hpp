#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lpfda/rng.hpp"

namespace lpfda {

// Diagonal regularity of the covariance. Jump: continuous first partials off
// the diagonal only, with one-sided limits on it. C2/C4: twice / four times
// continuously differentiable at (x, x), so the jump alpha(x) is zero.
enum class DiagSmoothness { Jump, C2, C4 };

struct DiagonalPartials {
    double rho11 = 0.0;               // d2 rho / dx dy at (x, x)
    double rho02 = 0.0;               // d2 rho / dy2 at (x, x)
    std::optional<double> rho13;      // d4 rho / dx dy3 at (x, x); needs C4
};

class CovarianceModel {
public:
    using Evaluator = std::function<double(double, double)>;

    static CovarianceModel wiener();               // rho(x,y) = min(x,y)
    static CovarianceModel ou(double lambda);      // rho(x,y) = exp(-lambda |x-y|)
    static CovarianceModel sqexp(double scale);    // rho(x,y) = exp(-((x-y)/scale)^2)
    static CovarianceModel zero();                 // rho = 0 (noise switched off)

    // Evaluator-only model; derivative structure is recovered numerically.
    // a5_regular=false marks a model without the off-diagonal regularity
    // needed for one-sided derivatives, making alpha() unavailable.
    static CovarianceModel custom(std::string name, Evaluator rho, DiagSmoothness smoothness,
                                  bool a5_regular = true);

    // "wiener" | "ou:<lambda>" | "sqexp:<scale>" | "zero"
    static CovarianceModel parse(const std::string& id);

    const std::string& name() const { return name_; }
    DiagSmoothness smoothness() const { return smoothness_; }

    double operator()(double x, double y) const { return rho_(x, y); }

    // alpha(x) = rho^(0,1)(x,x-) - rho^(0,1)(x,x+), the jump of the first
    // partial across the diagonal; always >= 0 for a valid covariance.
    // Falls back to one-sided finite differences (step 1e-6, Richardson)
    // when no closed form is attached. Throws NotAvailable without (A5).
    double alpha(double x) const;

    // Diagonal partials for the smooth-covariance expansions. Requires C2;
    // rho13 is filled only under C4. Throws NotAvailable otherwise.
    DiagonalPartials diagonal_partials(double x) const;

    Eigen::MatrixXd gram(std::span<const double> grid) const;

private:
    CovarianceModel() = default;

    std::string name_;
    Evaluator rho_;
    DiagSmoothness smoothness_ = DiagSmoothness::Jump;
    bool a5_regular_ = true;
    std::function<double(double)> alpha_fn_;                    // optional closed form
    std::function<DiagonalPartials(double)> partials_fn_;       // optional closed form
};

// Draws zero-mean Gaussian paths on a fixed grid. The covariance matrix is
// factorized once with a diagonal jitter ladder 0, 1e-12, 1e-10, 1e-8 (first
// success wins); the jitter actually used is recorded for audit.
class GaussianPathSampler {
public:
    GaussianPathSampler(const CovarianceModel& model, std::vector<double> grid);

    double jitter() const { return jitter_; }
    int grid_size() const { return static_cast<int>(grid_.size()); }

    // n independent paths, one per row; deterministic given (seed, n, grid).
    Eigen::MatrixXd sample(int n, std::uint64_t seed) const;

    // One draw of the average of n independent paths (same law as averaging
    // the rows of sample(n, .)): L z / sqrt(n).
    Eigen::VectorXd sample_pooled_mean(int n, std::uint64_t seed) const;

    const Eigen::MatrixXd& cholesky_factor() const { return chol_; }

private:
    std::vector<double> grid_;
    Eigen::MatrixXd chol_;
    double jitter_ = 0.0;
};

}  // namespace lpfda
