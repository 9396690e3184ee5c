// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Every tolerance is pinned in code; runtimes are reported.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "lpfda/asymptotics.hpp"
#include "lpfda/bandwidth.hpp"
#include "lpfda/errors.hpp"
#include "lpfda/locpoly.hpp"
#include "lpfda/rng.hpp"
#include "lpfda/simlab.hpp"

using namespace lpfda;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("%s criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

DesignGrid uniform_grid(int N) { return quantile_grid(SamplingDensity::uniform(), N); }

void criterion_1_table1() {
    auto t0 = std::chrono::steady_clock::now();
    struct Row {
        int n, N;
        double l2_ref, h_ref;
    };
    std::vector<Row> rows = {{10, 10, 0.031, 0.07}, {50, 50, 0.006, 0.03}, {100, 100, 0.003, 0.03}};
    bool pass = true;
    std::string detail = "Table 1 (Wiener, m1, nu=0, p=1):";
    for (const Row& row : rows) {
        ExperimentConfig c;
        c.regression = "m1";
        c.covariance = "wiener";
        c.n = row.n;
        c.N = row.N;
        c.nu = 0;
        c.p = 1;
        c.kernel = "tgauss";
        c.methods = {"exact"};
        c.replications = 1000;
        c.seed = 20260810;
        ExperimentReport r = run_experiment(c, 0);
        double h = r.method("exact").h;
        double l2 = r.method("exact").err_median;
        bool ok_h = std::abs(h - row.h_ref) <= 0.015;
        bool ok_l2 = std::abs(l2 - row.l2_ref) <= 0.25 * row.l2_ref;
        pass = pass && ok_h && ok_l2;
        detail += fmt(" [n=%d,N=%d: h_ex=%.3f (ref %.2f), L2=%.4f (ref %.3f)]", row.n, row.N, h,
                      row.h_ref, l2, row.l2_ref);
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    pass = pass && secs < 300.0;
    detail += fmt(" runtime %.1fs (<300s)", secs);
    report(1, pass, detail);
}

void criterion_2_table2() {
    ExperimentConfig c;
    c.regression = "m1";
    c.covariance = "ou:15";
    c.n = 10;
    c.N = 10;
    c.nu = 0;
    c.p = 1;
    c.kernel = "tgauss";
    c.methods = {"exact"};
    c.replications = 1000;
    c.seed = 20260810;
    ExperimentReport r = run_experiment(c, 0);
    double h = r.method("exact").h;
    double l2 = r.method("exact").err_median;
    bool pass = std::abs(h - 0.17) <= 0.03 && std::abs(l2 - 0.050) <= 0.25 * 0.050;
    report(2, pass,
           fmt("Table 2 spot (OU, m1, n=10, N=10): h_ex=%.3f (ref 0.17+-0.03), L2=%.4f "
               "(ref 0.050+-25%%)",
               h, l2));
}

void criterion_3_table4() {
    ExperimentConfig c;
    c.regression = "m1";
    c.covariance = "wiener";
    c.n = 50;
    c.N = 50;
    c.nu = 1;
    c.p = 1;
    c.kernel = "tgauss";
    c.methods = {"exact"};
    c.replications = 1000;
    c.seed = 20260813;
    ExperimentReport r = run_experiment(c, 0);
    double l2 = r.method("exact").err_median;
    bool pass = std::abs(l2 - 0.29) <= 0.25 * 0.29;
    report(3, pass, fmt("Table 4 spot (Wiener, m1', n=50, N=50): L2=%.3f (ref 0.29+-25%%)", l2));
}

void criterion_4_unbounded() {
    RegressionFunction m2 = regression_catalog("m2");
    CovarianceModel ou = CovarianceModel::ou(15.0);
    Kernel tg = Kernel::truncated_gaussian();
    bool pass = true;
    std::string detail = "infinite-bandwidth phenomenon (OU, m2, p=1, n=10):";
    for (int N : {50, 100}) {
        BandwidthResult r = exact_optimal_bandwidth(m2, ou, uniform_grid(N), 10, 0, 1, tg);
        pass = pass && std::isinf(r.h);
        detail += fmt(" [N=%d: h_ex=%s]", N, std::isinf(r.h) ? "inf" : fmt("%.2f", r.h).c_str());
    }
    report(4, pass, detail);
}

void criterion_5_alpha() {
    double a_ou = CovarianceModel::ou(15.0).alpha(0.37);
    double a_w = CovarianceModel::wiener().alpha(0.62);
    bool pass = std::abs(a_ou - 30.0) < 1e-6 && std::abs(a_w - 1.0) < 1e-6;
    report(5, pass, fmt("alpha values: OU(15) -> %.9f (30), Wiener -> %.9f (1)", a_ou, a_w));
}

void criterion_6_expansion_oracle() {
    RegressionFunction m1 = regression_catalog("m1");
    CovarianceModel w = CovarianceModel::wiener();
    Kernel epan = Kernel::epanechnikov();
    DesignGrid grid = uniform_grid(4001);
    const int n = 10000;
    const double x = 0.3;

    bool pass = true;
    std::string detail = "exact/asymptotic ratios (x=0.3, N=4001, n=1e4):";
    for (auto [nu, p] : std::vector<std::pair<int, int>>{{0, 1}, {1, 2}}) {
        const KernelTableau& t = tableau(epan, p);
        MomentOracle oracle(m1, w, grid);
        std::vector<double> dev_bias, dev_var;
        double rb05 = 0.0, rv05 = 0.0;
        for (double h : {0.2, 0.1, 0.05}) {
            ExactMoments em = oracle.at(FitSpec{p, nu, h, epan}, n, x);
            MomentExpansion bb = asym_bias(t, m1.deriv(p + 1, x), m1.deriv(p + 2, x), 0.0, h, nu);
            MomentExpansion vv = asym_variance(t, w, x, h, n, nu);
            double rb = em.bias / bb.total();
            double rv = em.variance / vv.total();
            dev_bias.push_back(std::abs(rb - 1.0));
            dev_var.push_back(std::abs(rv - 1.0));
            if (h == 0.05) {
                rb05 = rb;
                rv05 = rv;
            }
        }
        bool in_band = rb05 > 0.95 && rb05 < 1.05 && rv05 > 0.95 && rv05 < 1.05;
        // toward 1, allowing for sequences that already sit at the grid
        // discreteness floor (within 0.1%, fifty times inside the gate)
        auto toward_one = [](const std::vector<double>& dev) {
            for (std::size_t i = 1; i < dev.size(); ++i)
                if (dev[i] > dev[i - 1] && dev[i] > 1e-3) return false;
            return true;
        };
        bool monotone = toward_one(dev_bias) && toward_one(dev_var);
        pass = pass && in_band && monotone;
        detail += fmt(" [(nu=%d,p=%d): bias %.4f, var %.4f at h=0.05; monotone=%s]", nu, p, rb05,
                      rv05, monotone ? "yes" : "no");
    }
    report(6, pass, detail);
}

void criterion_7_smooth_variance_slope() {
    RegressionFunction m1 = regression_catalog("m1");
    CovarianceModel sq = CovarianceModel::sqexp(1.0);
    Kernel epan = Kernel::epanechnikov();
    DesignGrid grid = uniform_grid(4001);
    MomentOracle oracle(m1, sq, grid);
    const int n = 10000;
    const double x = 0.5, h = 0.05, d = 0.01 * h;

    double vp = oracle.at(FitSpec{1, 0, h + d, epan}, n, x).variance;
    double vm = oracle.at(FitSpec{1, 0, h - d, epan}, n, x).variance;
    double measured = (vp - vm) / (2.0 * d);
    const KernelTableau& t = tableau(epan, 1);
    double predicted = 2.0 * sq.diagonal_partials(x).rho02 * t.var_curvature_form(0) * h / n;
    bool pass = measured < 0.0 && std::abs(measured / predicted - 1.0) < 0.10;
    report(7, pass,
           fmt("smooth-covariance dVar/dh at h=%.2f: measured %.3e vs predicted %.3e "
               "(ratio %.3f)",
               h, measured, predicted, measured / predicted));
}

void criterion_8_quadratic_variation() {
    // quadratic variation of the sample processes themselves (the drift of a
    // regression mean adds an O(1/N) term that is not part of the law)
    DesignGrid grid = uniform_grid(100);
    auto make = [&](const CovarianceModel& model, std::uint64_t seed) {
        GaussianPathSampler sampler(model, grid.points);
        FunctionalSample s;
        s.grid = grid;
        s.values = sampler.sample(1000, seed);
        return quadratic_variation(s);
    };
    double vw = make(CovarianceModel::wiener(), 8801);
    double vou = make(CovarianceModel::ou(15.0), 8802);
    bool pass = std::abs(vw - 1.0) <= 0.05 && std::abs(vou - 27.8) <= 1.0;
    report(8, pass, fmt("quadratic variation at n=1000, N=100: Wiener %.4f (1.00+-0.05), "
                        "OU %.2f (27.8+-1.0)", vw, vou));
}

void criterion_9_normality() {
    double h = std::pow(400.0, -0.3);

    ExperimentConfig even;
    even.regression = "m1";
    even.covariance = "wiener";
    even.n = 400;
    even.N = 400;
    even.nu = 0;
    even.p = 1;
    even.kernel = "epanechnikov";
    even.methods = {"exact"};
    even.h = h;
    even.seed = 99003;
    KsResult k1 = normality_check(even, 0.5, 2000);

    // nu odd with alpha > 0: the Wiener covariance (alpha = 1) keeps the
    // limit-variance constant exact at this scale.
    ExperimentConfig odd = even;
    odd.nu = 1;
    odd.seed = 99002;
    KsResult k2 = normality_check(odd, 0.5, 2000);

    bool pass = k1.p_value > 0.01 && k2.p_value > 0.01;
    report(9, pass,
           fmt("limit-law KS checks (M=2000): nu=0 p=%.4f, nu=1 (alpha>0) p=%.4f (both >0.01)",
               k1.p_value, k2.p_value));
}

void criterion_10_cv_identity() {
    RegressionFunction m1 = regression_catalog("m1");
    Kernel epan = Kernel::epanechnikov();
    Rng rng(606060);
    double worst = 0.0;
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + static_cast<int>(rng.uniform01() * 8);
        int N = 6 + static_cast<int>(rng.uniform01() * 14);
        DesignGrid grid = uniform_grid(N);
        CovarianceModel model = trial % 2 ? CovarianceModel::wiener() : CovarianceModel::ou(15.0);
        GaussianPathSampler sampler(model, grid.points);
        FunctionalSample s;
        s.grid = grid;
        s.values = sampler.sample(n, 4000 + trial);
        for (int j = 0; j < grid.size(); ++j) s.values.col(j).array() += m1(grid.points[j]);

        BandwidthResult fast = cross_validate(s, 1, epan);
        for (const auto& [h, score] : fast.objective) {
            // literal refit without curve i
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                FunctionalSample reduced;
                reduced.grid = grid;
                reduced.values.resize(n - 1, N);
                int row = 0;
                for (int rr = 0; rr < n; ++rr)
                    if (rr != i) reduced.values.row(row++) = s.values.row(rr);
                for (int j = 0; j < N; ++j) {
                    double pred =
                        pointwise_fit(reduced, FitSpec{1, 0, h, epan}, grid.points[j]).estimate;
                    acc += (pred - s.values(i, j)) * (pred - s.values(i, j));
                }
            }
            worst = std::max(worst, std::abs(score - acc / (static_cast<double>(n) * N)));
            ++checked;
        }
    }
    bool pass = worst <= 1e-10 && checked > 0;
    report(10, pass,
           fmt("leave-one-curve-out identity on 100 random instances: max |fast - naive| = "
               "%.2e over %d scores (<=1e-10)", worst, checked));
}

void criterion_11_kernel_identities() {
    double id = abs_cross_moment_unweighted(1, 1);
    bool pass = std::abs(id + 8.0 / 15.0) < 1e-9;

    double worst = 0.0;
    for (const Kernel& k :
         {Kernel::truncated_gaussian(), Kernel::epanechnikov(), Kernel::uniform()}) {
        for (int p = 0; p <= 4; ++p) {
            const KernelTableau& t = tableau(k, p);
            for (int nu = 0; nu <= p; ++nu) {
                Eigen::VectorXd e = Eigen::VectorXd::Zero(p + 1);
                e[nu] = 1.0;
                Eigen::VectorXd y = t.S_factor.solve(e);
                Eigen::VectorXd z = t.S_factor.solve(t.S_star * y);
                worst = std::max(worst, std::abs(y.dot(t.S_tilde * z)));
                worst = std::max(worst, std::abs(t.sandwich_form(t.B, nu)));
                if ((p - nu) % 2 == 0) worst = std::max(worst, std::abs(t.bias_leading_form(nu)));
                if (nu % 2 == 1) worst = std::max(worst, std::abs(t.var_leading_form(nu)));
            }
        }
    }
    pass = pass && worst < 1e-10;
    report(11, pass,
           fmt("kernel identities: |uv cross moment + 8/15| = %.1e (<1e-9), max parity form "
               "= %.1e (<1e-10)", std::abs(id + 8.0 / 15.0), worst));
}

}  // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    criterion_1_table1();
    criterion_2_table2();
    criterion_3_table4();
    criterion_4_unbounded();
    criterion_5_alpha();
    criterion_6_expansion_oracle();
    criterion_7_smooth_variance_slope();
    criterion_8_quadratic_variation();
    criterion_9_normality();
    criterion_10_cv_identity();
    criterion_11_kernel_identities();
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s: %d/11 criteria passed in %.1f s\n", failures == 0 ? "OK" : "FAILED",
                11 - failures, secs);
    return failures == 0 ? 0 : 1;
}
