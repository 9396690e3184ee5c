#include "lpfda/bandwidth.hpp"

#include <algorithm>
#include <cmath>

#include "lpfda/errors.hpp"
#include "lpfda/quadrature.hpp"

namespace lpfda {

std::vector<double> bandwidth_ladder(int N, int p, double tau, int count) {
    if (N < 2) throw Error("bandwidth_ladder: need N >= 2");
    // Below this floor a window of width 2 tau h cannot span p+1 grid points
    // at the design spacing.
    double floor_h = (p + 1.0) / (2.0 * (N - 1.0) * tau);
    floor_h = std::min(floor_h, 0.5);
    std::vector<double> out(count);
    double lo = std::log(floor_h);
    double hi = std::log(1.0);
    for (int i = 0; i < count; ++i)
        out[i] = std::exp(lo + (hi - lo) * i / (count - 1.0));
    return out;
}

namespace {

// Picks the argmin over recorded (h, score) pairs. Scores within tol of the
// running best count as ties and go to the larger bandwidth (lower variance
// at equal score); tol = 0 gives the plain argmin.
std::size_t argmin_largest(const std::vector<std::pair<double, double>>& curve,
                           double tol = 0.0) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        if (curve[i].second < curve[best].second - tol ||
            (curve[i].second <= curve[best].second + tol && curve[i].first > curve[best].first))
            best = i;
    }
    return best;
}

}  // namespace

BandwidthResult exact_optimal_bandwidth(const RegressionFunction& truth,
                                        const CovarianceModel& model, const DesignGrid& grid,
                                        int n, int nu, int p, const Kernel& kernel,
                                        const std::function<double(double)>& w) {
    MomentOracle oracle(truth, model, grid);
    const int mesh = 101;
    std::vector<double> xs(mesh);
    for (int i = 0; i < mesh; ++i) xs[i] = static_cast<double>(i) / (mesh - 1);
    std::vector<double> sw = simpson_weights(xs);
    if (w)
        for (int i = 0; i < mesh; ++i) sw[i] *= w(xs[i]);

    auto imse = [&](double h) {
        FitSpec spec{p, nu, h, kernel};
        double total = 0.0;
        for (int i = 0; i < mesh; ++i) {
            ExactMoments m = oracle.at(spec, n, xs[i]);
            total += sw[i] * (m.bias * m.bias + m.variance);
        }
        return total;
    };

    BandwidthResult out;
    out.method = "exact";
    std::vector<double> ladder = bandwidth_ladder(grid.size(), p, kernel.tau());
    out.h_floor = ladder.front();
    ladder.push_back(kUnboundedBandwidth);
    for (double h : ladder) {
        try {
            out.objective.emplace_back(h, imse(h));
        } catch (const BandwidthTooSmall&) {
            ++out.skipped_candidates;
        } catch (const RankDeficient&) {
            ++out.skipped_candidates;
        }
    }
    if (out.objective.empty())
        throw AllCandidatesInfeasible("exact_optimal_bandwidth: no feasible candidate");

    std::size_t best = argmin_largest(out.objective);
    double h_best = out.objective[best].first;
    if (std::isinf(h_best)) {
        out.h = kUnboundedBandwidth;
        return out;
    }

    // Golden-section refinement inside the neighboring bracket.
    double lo = best > 0 ? out.objective[best - 1].first : h_best;
    double hi_idx_finite =
        best + 1 < out.objective.size() && std::isfinite(out.objective[best + 1].first)
            ? out.objective[best + 1].first
            : h_best;
    double hi = hi_idx_finite;
    out.at_lower_edge = best == 0;
    if (hi > lo) {
        const double gr = 0.6180339887498949;
        double a = lo, b = hi;
        double c = b - gr * (b - a);
        double d = a + gr * (b - a);
        double fc = imse(c), fd = imse(d);
        while (b - a > 1e-4) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = imse(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = imse(d);
            }
        }
        double h_ref = 0.5 * (a + b);
        double f_ref = imse(h_ref);
        out.objective.emplace_back(h_ref, f_ref);
    }
    best = argmin_largest(out.objective);
    out.h = out.objective[best].first;
    return out;
}

CvContext::CvContext(const DesignGrid& grid, int p, const Kernel& kernel) : grid_(grid) {
    int N = grid.size();
    std::vector<double> ladder = bandwidth_ladder(N, p, kernel.tau());
    h_floor_ = ladder.front();
    ladder.push_back(kUnboundedBandwidth);
    for (double h : ladder) {
        FitSpec spec{p, 0, h, kernel};
        Eigen::MatrixXd W(N, N);
        bool ok = true;
        try {
            for (int j = 0; j < N; ++j)
                W.row(j) = fit_weights(grid.points, spec, grid.points[j]).weight_row;
        } catch (const BandwidthTooSmall&) {
            ok = false;
        } catch (const RankDeficient&) {
            ok = false;
        }
        if (!ok) {
            ++skipped_;
            continue;
        }
        candidates_.push_back(h);
        gram_.push_back(W.transpose() * W);
        fit_.push_back(std::move(W));
    }
    if (candidates_.empty())
        throw AllCandidatesInfeasible("cross_validate: no feasible bandwidth candidate");
}

BandwidthResult cross_validate(const FunctionalSample& sample, const CvContext& ctx) {
    sample.validate();
    int n = sample.n();
    int N = sample.N();
    if (n < 2) throw Error("cross_validate: need at least two curves");
    if (sample.grid.points != ctx.grid().points)
        throw Error("cross_validate: sample grid does not match the context grid");

    Eigen::VectorXd ybar = sample.column_means();
    // My = sum_i Y_i Y_i', shared by every candidate through the traces
    //   sum_i Y_i' G Y_i = <G, My>  and  sum_i Y_i' W Y_i = <W, My>.
    Eigen::MatrixXd my = sample.values.transpose() * sample.values;
    double tr_my = my.trace();
    double c1 = 1.0 / (n - 1.0);

    BandwidthResult out;
    out.method = "cv";
    out.h_floor = ctx.h_floor();
    out.skipped_candidates = ctx.skipped();
    for (std::size_t k = 0; k < ctx.candidates_.size(); ++k) {
        const Eigen::MatrixXd& W = ctx.fit_[k];
        const Eigen::MatrixXd& G = ctx.gram_[k];
        Eigen::VectorXd yhat = W * ybar;
        Eigen::VectorXd a = (n * c1) * yhat;
        double score = n * a.squaredNorm() - 2.0 * n * a.dot(c1 * yhat + ybar) +
                       c1 * c1 * G.cwiseProduct(my).sum() + 2.0 * c1 * W.cwiseProduct(my).sum() +
                       tr_my;
        out.objective.emplace_back(ctx.candidates_[k], score / (static_cast<double>(n) * N));
    }
    // Scores agreeing to within the cancellation noise of the trace identity
    // are ties; the data's mean square sets the scale.
    double tie_tol = 1e-9 * std::max(tr_my / (static_cast<double>(n) * N), 1e-300);
    out.h = out.objective[argmin_largest(out.objective, tie_tol)].first;
    return out;
}

BandwidthResult cross_validate(const FunctionalSample& sample, int p, const Kernel& kernel) {
    CvContext ctx(sample.grid, p, kernel);
    return cross_validate(sample, ctx);
}

double quadratic_variation(const FunctionalSample& sample,
                           const std::function<double(double)>& w) {
    sample.validate();
    if (sample.N() < 2) throw Error("quadratic_variation: need N >= 2");
    const auto& x = sample.grid.points;
    double total = 0.0;
    for (int j = 1; j < sample.N(); ++j) {
        double wj = w ? w(x[j]) : 1.0;
        total += wj * (sample.values.col(j) - sample.values.col(j - 1)).squaredNorm();
    }
    return total / sample.n();
}

BandwidthResult plugin_bandwidth(const FunctionalSample& sample, int nu, int p,
                                 const Kernel& kernel) {
    sample.validate();
    int N = sample.N();
    if (sample.n() < 2) throw Error("plugin_bandwidth: need at least two curves");
    if (N < p + 3) throw Error("plugin_bandwidth: need N >= p + 3");

    double int_alpha = quadratic_variation(sample);

    // Pilot fit of the derivative order r that enters the bandwidth formula,
    // one polynomial order above r so the boundary bias stays at the interior
    // rate (the squared-derivative mass of a typical target concentrates near
    // the endpoints).
    int r = nu == 0 ? (p % 2 == 1 ? p + 1 : p + 2) : 3;
    double h_pilot = std::pow(static_cast<double>(N), -1.0 / (2.0 * r + 3.0));
    FitSpec pilot{std::min(r + 1, 4), r, h_pilot, kernel};

    const int mesh = 101;
    std::vector<double> xs(mesh);
    for (int i = 0; i < mesh; ++i) xs[i] = static_cast<double>(i) / (mesh - 1);
    std::vector<double> sw = simpson_weights(xs);
    double int_deriv_sq = 0.0;
    for (int i = 0; i < mesh; ++i) {
        double est = pointwise_fit(sample, pilot, xs[i]).estimate;
        int_deriv_sq += sw[i] * est * est;
    }

    const KernelTableau& t = tableau(kernel, p);
    BandwidthResult out;
    out.method = "plugin";
    out.h = h_opt_global_from_integrals(t, int_alpha, int_deriv_sq, sample.n(), nu, p);
    out.objective.emplace_back(out.h, 0.0);
    return out;
}

}  // namespace lpfda
