#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "lpfda/covariance.hpp"
#include "lpfda/design.hpp"
#include "lpfda/kernels.hpp"
#include "lpfda/regression.hpp"

namespace lpfda {

// Distinguished bandwidth value: the h -> infinity limit of a compact
// kernel, i.e. an unweighted global polynomial fit.
inline constexpr double kUnboundedBandwidth = std::numeric_limits<double>::infinity();

struct FitSpec {
    int p = 1;
    int nu = 0;
    double h = kUnboundedBandwidth;
    Kernel kernel = Kernel::epanechnikov();

    bool unbounded() const { return std::isinf(h); }
    void validate() const;  // 0 <= nu <= p <= 4, h > 0 or unbounded
};

// n curves observed on a common design grid; one curve per row.
struct FunctionalSample {
    DesignGrid grid;
    Eigen::MatrixXd values;  // n x N

    int n() const { return static_cast<int>(values.rows()); }
    int N() const { return static_cast<int>(values.cols()); }
    void validate() const;  // n >= 1, column count matches grid, finite entries
    Eigen::VectorXd column_means() const { return values.colwise().mean(); }
};

// One local fit: coefficients and the linear-smoother weight row such that
// the estimate of m^(nu)(x) is nu! beta[nu] == weight_row . ybar.
struct LocalFit {
    double x = 0.0;
    int p = 0;
    int nu = 0;
    Eigen::VectorXd beta;        // empty when built without data
    Eigen::VectorXd weight_row;  // length N, zero outside the kernel window
    int window_begin = 0;        // [window_begin, window_end) has nonzero kernel support
    int window_end = 0;
    int effective_points = 0;    // points with |x_j - x| <= tau h
    double estimate = 0.0;       // nu! beta[nu]
};

// Weight row only; no data needed. Throws BandwidthTooSmall when fewer than
// p+1 grid points fall inside the kernel window, RankDeficient when the
// centered-and-scaled normal matrix has condition number above 1e12.
LocalFit fit_weights(const std::vector<double>& grid, const FitSpec& spec, double x);

// Weighted least squares on the averaged curves at x; fills coefficients.
LocalFit pointwise_fit(const FunctionalSample& sample, const FitSpec& spec, double x);

// Maps pointwise_fit over eval_grid; boundary points keep whatever
// asymmetric window the kernel support provides.
std::vector<std::pair<double, double>> curve_estimate(const FunctionalSample& sample,
                                                      const FitSpec& spec,
                                                      const std::vector<double>& eval_grid);

struct ExactMoments {
    double bias = 0.0;
    double variance = 0.0;
};

// Exact finite-sample moments through the linear-smoother representation:
// bias = sum_j w_j m(x_j) - m^(nu)(x), variance = w' Sigma w / n. No
// asymptotics involved.
ExactMoments exact_moments(const RegressionFunction& truth, const CovarianceModel& model,
                           const DesignGrid& grid, const FitSpec& spec, int n, double x);

// Same computation with the grid covariance and true curve cached, for
// repeated evaluation across x and h (bandwidth search, IMSE curves).
class MomentOracle {
public:
    MomentOracle(const RegressionFunction& truth, const CovarianceModel& model, DesignGrid grid);

    ExactMoments at(const FitSpec& spec, int n, double x) const;
    const DesignGrid& grid() const { return grid_; }

private:
    const RegressionFunction truth_;
    const CovarianceModel model_;
    DesignGrid grid_;
    Eigen::VectorXd m_values_;
    Eigen::MatrixXd sigma_;  // dense only for moderate N
    bool dense_ = false;
};

}  // namespace lpfda
