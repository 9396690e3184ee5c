#include "lpfda/kernels.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "lpfda/errors.hpp"
#include "lpfda/quadrature.hpp"

namespace lpfda {

namespace {

double std_normal_pdf(double u) { return 0.3989422804014326779399461 * std::exp(-0.5 * u * u); }
double std_normal_cdf(double u) { return 0.5 * std::erfc(-u * M_SQRT1_2); }

}  // namespace

Kernel::Kernel(KernelId id, std::string name, double tau, std::function<double(double)> f)
    : id_(id), name_(std::move(name)), tau_(tau), density_(std::move(f)) {}

Kernel Kernel::truncated_gaussian(double tau) {
    if (!(tau > 0)) throw Error("truncated_gaussian: tau must be positive");
    double z = 2.0 * std_normal_cdf(tau) - 1.0;
    return Kernel(KernelId::TruncatedGaussian, "truncated-gaussian", tau,
                  [tau, z](double u) { return std::abs(u) > tau ? 0.0 : std_normal_pdf(u) / z; });
}

Kernel Kernel::epanechnikov() {
    return Kernel(KernelId::Epanechnikov, "epanechnikov", 1.0,
                  [](double u) { return std::abs(u) > 1.0 ? 0.0 : 0.75 * (1.0 - u * u); });
}

Kernel Kernel::uniform() {
    return Kernel(KernelId::Uniform, "uniform", 1.0,
                  [](double u) { return std::abs(u) > 1.0 ? 0.0 : 0.5; });
}

Kernel Kernel::custom(std::string name, double tau, std::function<double(double)> density) {
    if (!(tau > 0)) throw Error("custom kernel: tau must be positive");
    return Kernel(KernelId::Custom, std::move(name), tau, std::move(density));
}

Kernel Kernel::parse(const std::string& id) {
    if (id == "epanechnikov" || id == "epan") return epanechnikov();
    if (id == "uniform") return uniform();
    if (id == "truncated-gaussian" || id == "tgauss") return truncated_gaussian();
    if (id.rfind("tgauss:", 0) == 0)
        return truncated_gaussian(std::stod(id.substr(7)));
    throw UnknownId("unknown kernel id: " + id);
}

double Kernel::operator()(double u) const { return density_(u); }

std::string Kernel::cache_key() const {
    return name_ + ":" + std::to_string(tau_);
}

double Kernel::lipschitz_bound() const {
    const int grid = 4096;
    double L = 0.0;
    double prev = density_(-tau_);
    double step = 2.0 * tau_ / grid;
    for (int i = 1; i <= grid; ++i) {
        double cur = density_(-tau_ + i * step);
        L = std::max(L, std::abs(cur - prev) / step);
        prev = cur;
    }
    return L;
}

double kernel_moment(const Kernel& kernel, int k) {
    if (k < 0) throw Error("kernel_moment: k must be nonnegative");
    double tau = kernel.tau();
    switch (kernel.id()) {
        case KernelId::Uniform:
            return k % 2 ? 0.0 : std::pow(tau, k) / (k + 1);
        case KernelId::Epanechnikov:
            return k % 2 ? 0.0 : 3.0 / ((k + 1.0) * (k + 3.0));
        case KernelId::TruncatedGaussian: {
            if (k % 2) return 0.0;
            // mu_k = (k-1) mu_{k-2} - 2 tau^{k-1} phi(tau) / Z, mu_0 = 1.
            double z = 2.0 * std_normal_cdf(tau) - 1.0;
            double tail = 2.0 * std_normal_pdf(tau) / z;
            double m = 1.0;
            for (int j = 2; j <= k; j += 2) m = (j - 1) * m - std::pow(tau, j - 1) * tail;
            return m;
        }
        case KernelId::Custom:
            return adaptive_quad([&](double u) { return std::pow(u, k) * kernel(u); },
                                 -tau, tau, 1e-12);
    }
    throw Error("kernel_moment: unreachable");
}

namespace {

// iint f over [a,b]^2 with the inner integral split at v = u.
template <class F>
double split_square_quad(const F& f, double a, double b) {
    const GaussLegendre& g = GaussLegendre::rule64();
    double mid = 0.5 * (a + b);
    double half = 0.5 * (b - a);
    double total = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        double u = mid + half * g.nodes[i];
        double inner = g.integrate([&](double v) { return f(u, v); }, a, u) +
                       g.integrate([&](double v) { return f(u, v); }, u, b);
        total += g.weights[i] * inner;
    }
    return half * total;
}

}  // namespace

double cross_moment_abs(const Kernel& kernel, int k, int l) {
    if (k < 0 || l < 0) throw Error("cross_moment_abs: indices must be nonnegative");
    double tau = kernel.tau();
    return 0.5 * split_square_quad(
                     [&](double u, double v) {
                         return std::abs(u - v) * std::pow(u, k) * std::pow(v, l) *
                                kernel(u) * kernel(v);
                     },
                     -tau, tau);
}

double abs_cross_moment_unweighted(int k, int l) {
    return split_square_quad(
        [&](double u, double v) { return std::abs(u - v) * std::pow(u, k) * std::pow(v, l); },
        -1.0, 1.0);
}

KernelTableau build_tableau(const Kernel& kernel, int p) {
    if (p < 0 || p > 4) throw Error("build_tableau: supported fit orders are 0..4");

    KernelTableau t;
    t.p = p;
    t.tau = kernel.tau();
    t.kernel_name = kernel.name();

    int mmax = std::max(2 * p + 2, p + 3);
    t.moments.resize(mmax + 1);
    for (int k = 0; k <= mmax; ++k) t.moments[k] = kernel_moment(kernel, k);

    int d = p + 1;
    t.c.resize(d);
    t.c_tilde.resize(d);
    for (int k = 0; k < d; ++k) {
        t.c[k] = t.mu(p + 1 + k);
        t.c_tilde[k] = t.mu(p + 2 + k);
    }

    t.S.resize(d, d);
    t.S_tilde.resize(d, d);
    t.S_star.resize(d, d);
    t.B.resize(d, d);
    t.A1.resize(d, d);
    t.A2.resize(d, d);
    t.A3.resize(d, d);
    t.A.resize(d, d);
    for (int k = 0; k < d; ++k) {
        for (int l = 0; l < d; ++l) {
            t.S(k, l) = t.mu(k + l);
            t.S_tilde(k, l) = t.mu(k + l + 1);
            t.S_star(k, l) = t.mu(k) * t.mu(l);
            t.B(k, l) = 0.5 * (t.mu(k + 1) * t.mu(l) + t.mu(k) * t.mu(l + 1));
            t.A1(k, l) = 0.5 * (t.mu(k) * t.mu(l + 2) + t.mu(k + 2) * t.mu(l));
            t.A2(k, l) = t.mu(k + 1) * t.mu(l + 1);
            t.A3(k, l) = (t.mu(k + 3) * t.mu(l + 1) + t.mu(k + 1) * t.mu(l + 3)) / 6.0;
        }
    }
    for (int k = 0; k < d; ++k)
        for (int l = 0; l <= k; ++l) {
            double a = cross_moment_abs(kernel, k, l);
            t.A(k, l) = a;
            t.A(l, k) = a;
        }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t.S);
    double lo = eig.eigenvalues().minCoeff();
    double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e12)
        throw SingularMoments("moment matrix S is numerically singular for kernel " +
                              kernel.name());
    t.S_factor.compute(t.S);
    return t;
}

double KernelTableau::linear_form(const Eigen::VectorXd& v, int nu) const {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(p + 1);
    e[nu] = 1.0;
    return S_factor.solve(e).dot(v);
}

double KernelTableau::sandwich_form(const Eigen::MatrixXd& M, int nu) const {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(p + 1);
    e[nu] = 1.0;
    Eigen::VectorXd g = S_factor.solve(e);
    return g.dot(M * g);
}

double KernelTableau::design_form(int nu) const {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(p + 1);
    e[nu] = 1.0;
    return S_factor.solve(e).dot(S_tilde * S_factor.solve(c));
}

const KernelTableau& tableau(const Kernel& kernel, int p) {
    static std::mutex mu;
    static std::map<std::pair<std::string, int>, std::unique_ptr<KernelTableau>> cache;

    if (kernel.id() == KernelId::Custom) {
        // Custom evaluators are not cache-addressable by name alone.
        static std::mutex cmu;
        static std::vector<std::unique_ptr<KernelTableau>> keep;
        auto t = std::make_unique<KernelTableau>(build_tableau(kernel, p));
        std::lock_guard<std::mutex> lock(cmu);
        keep.push_back(std::move(t));
        return *keep.back();
    }

    std::pair<std::string, int> key{kernel.cache_key(), p};
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<KernelTableau>(build_tableau(kernel, p))).first;
    return *it->second;
}

}  // namespace lpfda
