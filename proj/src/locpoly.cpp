#include "lpfda/locpoly.hpp"

#include <algorithm>
#include <cmath>

#include "lpfda/errors.hpp"

namespace lpfda {

void FitSpec::validate() const {
    if (p < 0 || p > 4) throw Error("FitSpec: order p must be in 0..4");
    if (nu < 0 || nu > p) throw Error("FitSpec: need 0 <= nu <= p");
    if (!unbounded() && !(h > 0)) throw Error("FitSpec: bandwidth must be positive or unbounded");
}

void FunctionalSample::validate() const {
    if (values.rows() < 1) throw Error("FunctionalSample: need at least one curve");
    if (values.cols() != grid.size())
        throw Error("FunctionalSample: value columns must match the grid size");
    if (!values.allFinite()) throw Error("FunctionalSample: values must be finite");
}

namespace {

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

struct Window {
    int begin = 0;
    int end = 0;  // [begin, end)
};

Window kernel_window(const std::vector<double>& grid, double x, double half_width) {
    auto lo = std::lower_bound(grid.begin(), grid.end(), x - half_width);
    auto hi = std::upper_bound(grid.begin(), grid.end(), x + half_width);
    return {static_cast<int>(lo - grid.begin()), static_cast<int>(hi - grid.begin())};
}

// Shared assembly of the centered-and-scaled normal equations. The basis is
// ((x_j - x)/s)^k with s = h for a finite bandwidth and s = 1 otherwise;
// the raw basis is catastrophically ill conditioned for small h.
struct LocalSystem {
    Window win;
    double scale = 1.0;
    Eigen::MatrixXd basis;           // window x (p+1)
    Eigen::VectorXd kernel_weights;  // window
    Eigen::MatrixXd normal;          // (p+1) x (p+1)
    Eigen::LDLT<Eigen::MatrixXd> factor;
};

LocalSystem build_system(const std::vector<double>& grid, const FitSpec& spec, double x) {
    spec.validate();
    int N = static_cast<int>(grid.size());
    int d = spec.p + 1;

    LocalSystem sys;
    if (spec.unbounded()) {
        sys.win = {0, N};
        sys.scale = 1.0;
    } else {
        sys.win = kernel_window(grid, x, spec.kernel.tau() * spec.h);
        sys.scale = spec.h;
    }
    int m = sys.win.end - sys.win.begin;
    if (m < d)
        throw BandwidthTooSmall("fewer than p+1 grid points under the kernel window at x = " +
                                std::to_string(x));

    sys.basis.resize(m, d);
    sys.kernel_weights.resize(m);
    for (int r = 0; r < m; ++r) {
        double u = (grid[sys.win.begin + r] - x) / sys.scale;
        sys.kernel_weights[r] = spec.unbounded() ? 1.0 : spec.kernel(u);
        double b = 1.0;
        for (int k = 0; k < d; ++k) {
            sys.basis(r, k) = b;
            b *= u;
        }
    }

    sys.normal = sys.basis.transpose() * sys.kernel_weights.asDiagonal() * sys.basis;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sys.normal);
    double lo = eig.eigenvalues().minCoeff();
    double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e12)
        throw RankDeficient("local normal matrix is ill conditioned at x = " + std::to_string(x));
    sys.factor.compute(sys.normal);
    return sys;
}

}  // namespace

LocalFit fit_weights(const std::vector<double>& grid, const FitSpec& spec, double x) {
    LocalSystem sys = build_system(grid, spec, x);
    int N = static_cast<int>(grid.size());
    int m = sys.win.end - sys.win.begin;

    Eigen::VectorXd e = Eigen::VectorXd::Zero(spec.p + 1);
    e[spec.nu] = 1.0;
    Eigen::VectorXd g = sys.factor.solve(e);
    double rescale = factorial(spec.nu) / std::pow(sys.scale, spec.nu);

    LocalFit fit;
    fit.x = x;
    fit.p = spec.p;
    fit.nu = spec.nu;
    fit.window_begin = sys.win.begin;
    fit.window_end = sys.win.end;
    fit.effective_points = m;
    fit.weight_row = Eigen::VectorXd::Zero(N);
    for (int r = 0; r < m; ++r)
        fit.weight_row[sys.win.begin + r] =
            rescale * sys.kernel_weights[r] * sys.basis.row(r).dot(g);
    return fit;
}

LocalFit pointwise_fit(const FunctionalSample& sample, const FitSpec& spec, double x) {
    sample.validate();
    LocalSystem sys = build_system(sample.grid.points, spec, x);
    Eigen::VectorXd ybar = sample.column_means();

    int m = sys.win.end - sys.win.begin;
    Eigen::VectorXd rhs =
        sys.basis.transpose() *
        (sys.kernel_weights.array() * ybar.segment(sys.win.begin, m).array()).matrix();
    Eigen::VectorXd a = sys.factor.solve(rhs);

    LocalFit fit = fit_weights(sample.grid.points, spec, x);
    fit.beta.resize(spec.p + 1);
    for (int k = 0; k <= spec.p; ++k) fit.beta[k] = a[k] / std::pow(sys.scale, k);
    fit.estimate = factorial(spec.nu) * fit.beta[spec.nu];
    return fit;
}

std::vector<std::pair<double, double>> curve_estimate(const FunctionalSample& sample,
                                                      const FitSpec& spec,
                                                      const std::vector<double>& eval_grid) {
    std::vector<std::pair<double, double>> out;
    out.reserve(eval_grid.size());
    for (double x : eval_grid) out.emplace_back(x, pointwise_fit(sample, spec, x).estimate);
    return out;
}

namespace {

ExactMoments moments_from_fit(const LocalFit& fit, const RegressionFunction& truth,
                              const CovarianceModel& model, const Eigen::MatrixXd* sigma,
                              const std::vector<double>& grid, const Eigen::VectorXd* m_values,
                              int n, double x) {
    ExactMoments out;
    double fitted = 0.0;
    for (int j = fit.window_begin; j < fit.window_end; ++j)
        fitted += fit.weight_row[j] * (m_values ? (*m_values)[j] : truth(grid[j]));
    out.bias = fitted - truth.deriv(fit.nu, x);

    double q = 0.0;
    if (sigma) {
        int m = fit.window_end - fit.window_begin;
        auto w = fit.weight_row.segment(fit.window_begin, m);
        q = w.dot(sigma->block(fit.window_begin, fit.window_begin, m, m) * w);
    } else {
        for (int i = fit.window_begin; i < fit.window_end; ++i) {
            double wi = fit.weight_row[i];
            q += wi * wi * model(grid[i], grid[i]);
            for (int j = fit.window_begin; j < i; ++j)
                q += 2.0 * wi * fit.weight_row[j] * model(grid[i], grid[j]);
        }
    }
    out.variance = q / n;
    return out;
}

}  // namespace

ExactMoments exact_moments(const RegressionFunction& truth, const CovarianceModel& model,
                           const DesignGrid& grid, const FitSpec& spec, int n, double x) {
    if (n < 1) throw Error("exact_moments: n must be at least 1");
    LocalFit fit = fit_weights(grid.points, spec, x);
    return moments_from_fit(fit, truth, model, nullptr, grid.points, nullptr, n, x);
}

MomentOracle::MomentOracle(const RegressionFunction& truth, const CovarianceModel& model,
                           DesignGrid grid)
    : truth_(truth), model_(model), grid_(std::move(grid)) {
    int N = grid_.size();
    m_values_.resize(N);
    for (int j = 0; j < N; ++j) m_values_[j] = truth_(grid_.points[j]);
    dense_ = N <= 1024;
    if (dense_) sigma_ = model_.gram(grid_.points);
}

ExactMoments MomentOracle::at(const FitSpec& spec, int n, double x) const {
    if (n < 1) throw Error("MomentOracle: n must be at least 1");
    LocalFit fit = fit_weights(grid_.points, spec, x);
    return moments_from_fit(fit, truth_, model_, dense_ ? &sigma_ : nullptr, grid_.points,
                            &m_values_, n, x);
}

}  // namespace lpfda
