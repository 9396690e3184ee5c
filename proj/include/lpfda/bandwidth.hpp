#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lpfda/asymptotics.hpp"
#include "lpfda/locpoly.hpp"

namespace lpfda {

struct BandwidthResult {
    double h = kUnboundedBandwidth;
    std::string method;   // "exact" | "asymptotic" | "cv" | "plugin"
    // Candidate bandwidths and their scores, in evaluation order; h is the
    // argmin with ties broken toward larger h. Infeasible candidates are
    // skipped and counted, not recorded.
    std::vector<std::pair<double, double>> objective;
    double h_floor = 0.0;
    double h_ceil = 1.0;
    int skipped_candidates = 0;
    bool at_lower_edge = false;
};

// Log-spaced candidate bandwidths from the smallest h whose kernel window
// can span p+1 grid points up to 1. The unbounded candidate is appended by
// the search routines, not here.
std::vector<double> bandwidth_ladder(int N, int p, double tau, int count = 60);

// Oracle bandwidth: minimizes the exact IMSE (squared bias plus variance
// from the linear-smoother representation, integrated by Simpson over a
// 101-point mesh with weight w), over the ladder plus the unbounded
// candidate, refined by golden-section within the best bracket to 1e-4.
BandwidthResult exact_optimal_bandwidth(const RegressionFunction& truth,
                                        const CovarianceModel& model, const DesignGrid& grid,
                                        int n, int nu, int p, const Kernel& kernel,
                                        const std::function<double(double)>& w = nullptr);

// Precomputed smoother matrices for leave-one-curve-out cross-validation on
// a fixed grid: one fit matrix W_h per feasible candidate, evaluated at the
// design points with nu = 0, plus G_h = W_h' W_h for the trace identity.
class CvContext {
public:
    CvContext(const DesignGrid& grid, int p, const Kernel& kernel);

    const DesignGrid& grid() const { return grid_; }
    const std::vector<double>& candidates() const { return candidates_; }
    int skipped() const { return skipped_; }
    double h_floor() const { return h_floor_; }

private:
    friend BandwidthResult cross_validate(const FunctionalSample&, const CvContext&);

    DesignGrid grid_;
    std::vector<double> candidates_;      // feasible only; last may be unbounded
    std::vector<Eigen::MatrixXd> fit_;    // W_h, N x N
    std::vector<Eigen::MatrixXd> gram_;   // W_h' W_h
    int skipped_ = 0;
    double h_floor_ = 0.0;
};

// Leave-one-curve-out score of Rice-Silverman type,
//   CV(h) = (1/nN) sum_i sum_j (mhat_0^{(-i)}(x_j; h) - Y_i(x_j))^2,
// computed through the identity ybar^{(-i)} = (n ybar - Y_i)/(n-1) so each
// smoother matrix is built once per bandwidth and shared across folds.
BandwidthResult cross_validate(const FunctionalSample& sample, const CvContext& ctx);
BandwidthResult cross_validate(const FunctionalSample& sample, int p, const Kernel& kernel);

// V_N = (1/n) sum_i sum_{j>=2} (Y_i(x_j) - Y_i(x_{j-1}))^2 w(x_j); consistent
// for the weighted integral of the covariance jump alpha.
double quadratic_variation(const FunctionalSample& sample,
                           const std::function<double(double)>& w = nullptr);

// Data-driven plug-in: alpha integral from the quadratic variation, the
// squared-derivative integral of order r (r = p+1 for nu=0 with p odd, p+2
// for p even, 3 for nu=1) from a pilot local fit of order r+1 with pilot
// bandwidth N^{-1/(2r+3)}; both plugged into the global optimal-bandwidth
// formula.
BandwidthResult plugin_bandwidth(const FunctionalSample& sample, int nu, int p,
                                 const Kernel& kernel);

}  // namespace lpfda
