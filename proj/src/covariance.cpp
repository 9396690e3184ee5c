#include "lpfda/covariance.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "lpfda/errors.hpp"

namespace lpfda {

CovarianceModel CovarianceModel::wiener() {
    CovarianceModel m;
    m.name_ = "wiener";
    m.rho_ = [](double x, double y) { return std::min(x, y); };
    m.smoothness_ = DiagSmoothness::Jump;
    m.alpha_fn_ = [](double) { return 1.0; };
    return m;
}

CovarianceModel CovarianceModel::ou(double lambda) {
    if (!(lambda > 0)) throw Error("ou: lambda must be positive");
    CovarianceModel m;
    m.name_ = "ou:" + std::to_string(lambda);
    m.rho_ = [lambda](double x, double y) { return std::exp(-lambda * std::abs(x - y)); };
    m.smoothness_ = DiagSmoothness::Jump;
    m.alpha_fn_ = [lambda](double) { return 2.0 * lambda; };
    return m;
}

CovarianceModel CovarianceModel::sqexp(double scale) {
    if (!(scale > 0)) throw Error("sqexp: scale must be positive");
    CovarianceModel m;
    m.name_ = "sqexp:" + std::to_string(scale);
    double s2 = scale * scale;
    m.rho_ = [s2](double x, double y) {
        double r = x - y;
        return std::exp(-r * r / s2);
    };
    m.smoothness_ = DiagSmoothness::C4;
    m.alpha_fn_ = [](double) { return 0.0; };
    m.partials_fn_ = [s2](double) {
        DiagonalPartials d;
        d.rho11 = 2.0 / s2;
        d.rho02 = -2.0 / s2;
        d.rho13 = -12.0 / (s2 * s2);
        return d;
    };
    return m;
}

CovarianceModel CovarianceModel::zero() {
    CovarianceModel m;
    m.name_ = "zero";
    m.rho_ = [](double, double) { return 0.0; };
    m.smoothness_ = DiagSmoothness::C4;
    m.alpha_fn_ = [](double) { return 0.0; };
    m.partials_fn_ = [](double) { return DiagonalPartials{0.0, 0.0, 0.0}; };
    return m;
}

CovarianceModel CovarianceModel::custom(std::string name, Evaluator rho,
                                        DiagSmoothness smoothness, bool a5_regular) {
    CovarianceModel m;
    m.name_ = std::move(name);
    m.rho_ = std::move(rho);
    m.smoothness_ = smoothness;
    m.a5_regular_ = a5_regular;
    return m;
}

CovarianceModel CovarianceModel::parse(const std::string& id) {
    if (id == "wiener") return wiener();
    if (id == "zero") return zero();
    if (id.rfind("ou:", 0) == 0) return ou(std::stod(id.substr(3)));
    if (id == "ou") return ou(15.0);
    if (id.rfind("sqexp:", 0) == 0) return sqexp(std::stod(id.substr(6)));
    if (id == "sqexp") return sqexp(1.0);
    throw UnknownId("unknown covariance id: " + id);
}

double CovarianceModel::alpha(double x) const {
    if (!a5_regular_)
        throw NotAvailable("alpha: model " + name_ + " declares no off-diagonal regularity");
    if (alpha_fn_) return alpha_fn_(x);
    if (smoothness_ != DiagSmoothness::Jump) return 0.0;

    // One-sided first differences toward the diagonal with one Richardson
    // step; a central stencil would smear the jump.
    const double d = 1e-6;
    auto below = [&](double step) { return (rho_(x, x) - rho_(x, x - step)) / step; };
    auto above = [&](double step) { return (rho_(x, x + step) - rho_(x, x)) / step; };
    double minus = 2.0 * below(d / 2) - below(d);
    double plus = 2.0 * above(d / 2) - above(d);
    return minus - plus;
}

DiagonalPartials CovarianceModel::diagonal_partials(double x) const {
    if (smoothness_ == DiagSmoothness::Jump)
        throw NotAvailable("diagonal_partials: model " + name_ +
                           " is not differentiable on the diagonal");
    if (partials_fn_) {
        DiagonalPartials d = partials_fn_(x);
        if (smoothness_ != DiagSmoothness::C4) d.rho13.reset();
        return d;
    }

    DiagonalPartials d;
    const double s = 1e-4;
    d.rho02 = (rho_(x, x + s) - 2.0 * rho_(x, x) + rho_(x, x - s)) / (s * s);
    d.rho11 = (rho_(x + s, x + s) - rho_(x + s, x - s) - rho_(x - s, x + s) +
               rho_(x - s, x - s)) /
              (4.0 * s * s);
    if (smoothness_ == DiagSmoothness::C4) {
        const double t = 5e-3;  // third derivative stencil needs a wider step
        auto dy3 = [&](double xx) {
            return (rho_(xx, x + 2 * t) - 2.0 * rho_(xx, x + t) + 2.0 * rho_(xx, x - t) -
                    rho_(xx, x - 2 * t)) /
                   (2.0 * t * t * t);
        };
        d.rho13 = (dy3(x + t) - dy3(x - t)) / (2.0 * t);
    }
    return d;
}

Eigen::MatrixXd CovarianceModel::gram(std::span<const double> grid) const {
    Eigen::Index n = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) {
            double v = rho_(grid[i], grid[j]);
            g(i, j) = v;
            g(j, i) = v;
        }
    return g;
}

GaussianPathSampler::GaussianPathSampler(const CovarianceModel& model, std::vector<double> grid)
    : grid_(std::move(grid)) {
    Eigen::MatrixXd sigma = model.gram(grid_);
    const double ladder[] = {0.0, 1e-12, 1e-10, 1e-8};
    for (double j : ladder) {
        Eigen::MatrixXd s = sigma;
        s.diagonal().array() += j;
        Eigen::LLT<Eigen::MatrixXd> llt(s);
        if (llt.info() == Eigen::Success) {
            Eigen::MatrixXd L = llt.matrixL();
            if (L.allFinite()) {
                chol_ = std::move(L);
                jitter_ = j;
                return;
            }
        }
    }
    throw NotPsd("covariance factorization failed for model " + model.name() +
                 " at maximal jitter");
}

Eigen::MatrixXd GaussianPathSampler::sample(int n, std::uint64_t seed) const {
    Eigen::Index N = chol_.rows();
    Eigen::MatrixXd z(n, N);
    Rng rng(Rng::for_stream(seed, 0));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < N; ++j) z(i, j) = rng.normal();
    return z * chol_.transpose();
}

Eigen::VectorXd GaussianPathSampler::sample_pooled_mean(int n, std::uint64_t seed) const {
    Eigen::Index N = chol_.rows();
    Eigen::VectorXd z(N);
    Rng rng(Rng::for_stream(seed, 0));
    for (Eigen::Index j = 0; j < N; ++j) z[j] = rng.normal();
    return chol_ * z / std::sqrt(static_cast<double>(n));
}

}  // namespace lpfda
