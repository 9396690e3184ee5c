#include "lpfda/simlab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>

#include <nlohmann/json.hpp>

#include "lpfda/errors.hpp"
#include "lpfda/parallel.hpp"
#include "lpfda/quadrature.hpp"

namespace lpfda {

double snr(const RegressionFunction& truth, const CovarianceModel& model, int n) {
    const int mesh = 1001;
    double lo = truth(0.0), hi = truth(0.0);
    for (int i = 1; i < mesh; ++i) {
        double v = truth(static_cast<double>(i) / (mesh - 1));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double noise = adaptive_quad([&](double t) { return model(t, t); }, 0.0, 1.0, 1e-10);
    return std::sqrt(static_cast<double>(n)) * (hi - lo) / noise;
}

void ExperimentConfig::validate() const {
    if (n < 1 || N < 2 || replications < 1) throw Error("ExperimentConfig: counts must be positive");
    if (methods.empty()) throw Error("ExperimentConfig: need at least one bandwidth method");
    for (const auto& m : methods)
        if (m != "exact" && m != "asym" && m != "cv")
            throw UnknownId("ExperimentConfig: unknown method " + m);
    if (nu < 0 || p < nu || p > 4) throw Error("ExperimentConfig: need 0 <= nu <= p <= 4");
    if (weight != "uniform") throw UnknownId("ExperimentConfig: unknown weight " + weight);
    if (h && !(*h > 0)) throw Error("ExperimentConfig: fixed bandwidth must be positive");
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.regression = j.value("regression", c.regression);
    c.covariance = j.value("covariance", c.covariance);
    c.n = j.value("n", c.n);
    c.N = j.value("N", c.N);
    c.nu = j.value("nu", c.nu);
    c.p = j.value("p", c.p);
    c.kernel = j.value("kernel", c.kernel);
    c.density = j.value("density", c.density);
    if (j.contains("methods")) c.methods = j.at("methods").get<std::vector<std::string>>();
    c.replications = j.value("replications", c.replications);
    c.seed = j.value("seed", c.seed);
    c.eval_mesh = j.value("eval_mesh", c.eval_mesh);
    c.weight = j.value("weight", c.weight);
    if (j.contains("h") && !j.at("h").is_null()) c.h = j.at("h").get<double>();
    c.validate();
    return c;
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j{{"regression", regression}, {"covariance", covariance}, {"n", n},
                     {"N", N},                   {"nu", nu},                 {"p", p},
                     {"kernel", kernel},         {"density", density},       {"methods", methods},
                     {"replications", replications},
                     {"seed", seed},             {"eval_mesh", eval_mesh},   {"weight", weight}};
    if (h) j["h"] = *h;
    return j;
}

const MethodSummary& ExperimentReport::method(const std::string& name) const {
    for (const auto& m : methods)
        if (m.method == name) return m;
    throw UnknownId("report has no method " + name);
}

double quantile_type8(std::vector<double> values, double prob) {
    if (values.empty()) throw Error("quantile: empty sample");
    std::sort(values.begin(), values.end());
    std::size_t n = values.size();
    double hpos = (n + 1.0 / 3.0) * prob + 1.0 / 3.0;  // 1-based
    if (hpos <= 1.0) return values.front();
    if (hpos >= static_cast<double>(n)) return values.back();
    std::size_t idx = static_cast<std::size_t>(hpos);
    double frac = hpos - static_cast<double>(idx);
    double lo = values[idx - 1];
    double hi = values[idx];
    if (frac == 0.0 || lo == hi) return lo;
    if (std::isinf(hi)) return frac > 0.0 ? hi : lo;
    return lo + frac * (hi - lo);
}

namespace {

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

// Asymptotic Kolmogorov distribution tail.
double kolmogorov_tail(double lambda) {
    if (lambda < 1e-8) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 ? term : -term);
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

std::vector<double> eval_mesh_points(const ExperimentConfig& config, const DesignGrid& grid) {
    if (config.eval_mesh <= 0) return grid.points;
    int M = std::max(config.eval_mesh, 3);
    std::vector<double> xs(M);
    for (int i = 0; i < M; ++i) xs[i] = static_cast<double>(i) / (M - 1);
    return xs;
}

// Fit matrix: rows are smoother weight rows at the evaluation points.
Eigen::MatrixXd fit_matrix(const DesignGrid& grid, const FitSpec& spec,
                           const std::vector<double>& eval) {
    Eigen::MatrixXd W(static_cast<Eigen::Index>(eval.size()), grid.size());
    for (std::size_t i = 0; i < eval.size(); ++i)
        W.row(static_cast<Eigen::Index>(i)) = fit_weights(grid.points, spec, eval[i]).weight_row;
    return W;
}

// A formula bandwidth can fall below boundary feasibility on coarse grids
// (the one-sided window at x = 0 holds fewer than p+1 points). The fit then
// uses the smallest feasible bandwidth above it; the ratio is recorded
// through h_fit in the method summary.
std::pair<double, Eigen::MatrixXd> feasible_fit_matrix(const DesignGrid& grid, FitSpec spec,
                                                       const std::vector<double>& eval) {
    for (int tries = 0; tries < 400; ++tries) {
        try {
            return {spec.h, fit_matrix(grid, spec, eval)};
        } catch (const BandwidthTooSmall&) {
        } catch (const RankDeficient&) {
        }
        spec.h = std::min(spec.h * 1.02, 2.0);
    }
    throw AllCandidatesInfeasible("no feasible fit bandwidth at this design size");
}

}  // namespace

KsResult ks_test_standard_normal(std::vector<double> samples) {
    if (samples.empty()) throw Error("ks_test: empty sample");
    std::sort(samples.begin(), samples.end());
    double M = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = std_normal_cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / M));
        d = std::max(d, std::abs(f - static_cast<double>(i + 1) / M));
    }
    double sq = std::sqrt(M);
    KsResult out;
    out.statistic = d;
    out.p_value = kolmogorov_tail((sq + 0.12 + 0.11 / sq) * d);
    return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config, int workers) {
    config.validate();
    auto t0 = std::chrono::steady_clock::now();

    RegressionFunction truth = regression_catalog(config.regression);
    CovarianceModel model = CovarianceModel::parse(config.covariance);
    Kernel kernel = Kernel::parse(config.kernel);
    const KernelTableau& tab = tableau(kernel, config.p);
    SamplingDensity density =
        config.density == "optimal"
            ? optimal_density(
                  tab, config.nu, config.p,
                  [&truth, &config](double x) { return truth.deriv(config.p + 1, x); },
                  config.p + 2 <= 4 ? std::function<double(double)>([&truth, &config](double x) {
                      return truth.deriv(config.p + 2, x);
                  })
                                    : nullptr)
            : SamplingDensity::parse(config.density);
    DesignGrid grid = quantile_grid(density, config.N);

    std::vector<double> eval = eval_mesh_points(config, grid);
    std::vector<double> sw = simpson_weights(eval);
    Eigen::VectorXd truth_nu(static_cast<Eigen::Index>(eval.size()));
    for (std::size_t i = 0; i < eval.size(); ++i)
        truth_nu[static_cast<Eigen::Index>(i)] = truth.deriv(config.nu, eval[i]);
    Eigen::VectorXd m_grid(grid.size());
    for (int j = 0; j < grid.size(); ++j) m_grid[j] = truth(grid.points[j]);

    // Oracle bandwidths and their fit matrices, computed once.
    struct FixedMethod {
        std::string name;
        double h;
        double h_fit;
        Eigen::MatrixXd W;
    };
    std::vector<FixedMethod> fixed;
    bool want_cv = false;
    for (const auto& m : config.methods) {
        if (m == "cv") {
            want_cv = true;
            continue;
        }
        double h = m == "exact"
                       ? exact_optimal_bandwidth(truth, model, grid, config.n, config.nu,
                                                 config.p, kernel)
                             .h
                       : h_opt_global(tab, model, truth, nullptr, config.n, config.nu, config.p);
        auto [h_fit, W] =
            feasible_fit_matrix(grid, FitSpec{config.p, config.nu, h, kernel}, eval);
        fixed.push_back({m, h, h_fit, std::move(W)});
    }

    // Cross-validation context plus per-candidate fit matrices for the
    // target derivative (the CV score itself always smooths the curves).
    std::unique_ptr<CvContext> cv_ctx;
    std::vector<Eigen::MatrixXd> cv_fit;  // empty matrix: infeasible at the eval mesh
    if (want_cv) {
        cv_ctx = std::make_unique<CvContext>(grid, config.p, kernel);
        cv_fit.resize(cv_ctx->candidates().size());
        for (std::size_t k = 0; k < cv_ctx->candidates().size(); ++k) {
            try {
                cv_fit[k] = fit_matrix(
                    grid, FitSpec{config.p, config.nu, cv_ctx->candidates()[k], kernel}, eval);
            } catch (const Error&) {
            }
        }
    }

    GaussianPathSampler sampler(model, grid.points);

    int R = config.replications;
    std::vector<std::vector<double>> errs(fixed.size() + (want_cv ? 1 : 0),
                                          std::vector<double>(R, 0.0));
    std::vector<double> cv_h(want_cv ? R : 0, 0.0);
    std::vector<char> failed(R, 0);

    parallel_for(static_cast<std::size_t>(R), workers, [&](std::size_t r) {
        try {
            Eigen::MatrixXd paths =
                sampler.sample(config.n, derive_stream_seed(config.seed, r));
            paths.rowwise() += m_grid.transpose();
            Eigen::VectorXd ybar = paths.colwise().mean();

            auto l2_error = [&](const Eigen::MatrixXd& W) {
                Eigen::VectorXd diff = W * ybar - truth_nu;
                double total = 0.0;
                for (std::size_t i = 0; i < sw.size(); ++i)
                    total += sw[i] * diff[static_cast<Eigen::Index>(i)] *
                             diff[static_cast<Eigen::Index>(i)];
                return total;
            };

            for (std::size_t k = 0; k < fixed.size(); ++k) errs[k][r] = l2_error(fixed[k].W);

            if (want_cv) {
                FunctionalSample sample{grid, std::move(paths)};
                BandwidthResult cv = cross_validate(sample, *cv_ctx);
                cv_h[r] = cv.h;
                std::size_t k = 0;
                while (k < cv_ctx->candidates().size() && cv_ctx->candidates()[k] != cv.h) ++k;
                if (cv_fit[k].size() == 0)
                    throw BandwidthTooSmall("cv-selected bandwidth infeasible at eval mesh");
                errs[fixed.size()][r] = l2_error(cv_fit[k]);
            }
        } catch (const Error&) {
            failed[r] = 1;
        }
    });

    int n_failed = 0;
    for (char f : failed) n_failed += f;
    if (n_failed * 100 > R)
        throw Error("run_experiment: more than 1% of replications failed");

    auto keep_ok = [&](const std::vector<double>& v) {
        std::vector<double> out;
        out.reserve(v.size());
        for (int r = 0; r < R; ++r)
            if (!failed[r]) out.push_back(v[r]);
        return out;
    };

    ExperimentReport report;
    report.config = config;
    report.snr = snr(truth, model, config.n);
    report.failed_replications = n_failed;
    for (std::size_t k = 0; k < fixed.size(); ++k) {
        std::vector<double> e = keep_ok(errs[k]);
        report.methods.push_back({fixed[k].name, fixed[k].h, fixed[k].h_fit,
                                  quantile_type8(e, 0.25), quantile_type8(e, 0.5),
                                  quantile_type8(e, 0.75)});
    }
    if (want_cv) {
        std::vector<double> e = keep_ok(errs[fixed.size()]);
        double h_med = quantile_type8(keep_ok(cv_h), 0.5);
        report.methods.push_back({"cv", h_med, h_med, quantile_type8(e, 0.25),
                                  quantile_type8(e, 0.5), quantile_type8(e, 0.75)});
    }
    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

KsResult normality_check(const ExperimentConfig& config, double x, int M) {
    config.validate();
    if (!config.h) throw Error("normality_check: config must fix a bandwidth h");
    double h = *config.h;

    RegressionFunction truth = regression_catalog(config.regression);
    CovarianceModel model = CovarianceModel::parse(config.covariance);
    Kernel kernel = Kernel::parse(config.kernel);
    DesignGrid grid = quantile_grid(SamplingDensity::parse(config.density), config.N);
    const KernelTableau& tab = tableau(kernel, config.p);

    NormalityParams params = normality_params(tab, model, x, h, config.n, config.nu);
    if (!params.decay_satisfied(config.n, h))
        throw ConditionViolated("normality_check: n h^" +
                                std::to_string(params.decay_h_exponent) +
                                " is not small at the supplied (n, h)");
    if (params.needs_Nh5 && config.N * std::pow(h, 5) <= 1.0)
        throw ConditionViolated("normality_check: N h^5 must be large");

    Eigen::VectorXd w =
        fit_weights(grid.points, FitSpec{config.p, config.nu, h, kernel}, x).weight_row;
    Eigen::VectorXd m_grid(grid.size());
    for (int j = 0; j < grid.size(); ++j) m_grid[j] = truth(grid.points[j]);
    double center = truth.deriv(config.nu, x);
    double scale =
        std::sqrt(config.n * std::pow(h, params.scaling_h_exponent) / params.sigma2);

    GaussianPathSampler sampler(model, grid.points);
    std::vector<double> standardized(M);
    // The estimator only sees the averaged curves; drawing the pooled mean
    // directly has the same law as averaging n sampled paths.
    for (int m = 0; m < M; ++m) {
        Eigen::VectorXd eps =
            sampler.sample_pooled_mean(config.n, derive_stream_seed(config.seed, m));
        double est = w.dot(m_grid + eps);
        standardized[m] = (est - center) * scale;
    }
    return ks_test_standard_normal(std::move(standardized));
}

namespace {

std::string format_bandwidth(double h) {
    if (std::isinf(h)) return "inf";
    char buf[32];
    snprintf(buf, sizeof buf, "%.2f", h);
    return buf;
}

std::string format_l2_cell(const MethodSummary& m) {
    char buf[96];
    snprintf(buf, sizeof buf, "%.3f (%.3f-%.3f)", m.err_median, m.err_q1, m.err_q3);
    return buf;
}

const MethodSummary* find_method(const ExperimentReport& r, const std::string& name) {
    for (const auto& m : r.methods)
        if (m.method == name) return &m;
    return nullptr;
}

}  // namespace

L2Cell parse_l2_cell(const std::string& cell) {
    L2Cell out;
    if (std::sscanf(cell.c_str(), "%lf (%lf-%lf)", &out.median, &out.q1, &out.q3) != 3)
        throw Error("parse_l2_cell: malformed cell '" + cell + "'");
    return out;
}

nlohmann::json ExperimentReport::to_json() const {
    nlohmann::json j;
    j["config"] = config.to_json();
    j["snr"] = snr;
    j["failed_replications"] = failed_replications;
    j["runtime_seconds"] = runtime_seconds;
    j["methods"] = nlohmann::json::array();
    for (const auto& m : methods)
        j["methods"].push_back(
            {{"method", m.method},
             {"h", std::isinf(m.h) ? nlohmann::json("inf") : nlohmann::json(m.h)},
             {"h_fit", std::isinf(m.h_fit) ? nlohmann::json("inf") : nlohmann::json(m.h_fit)},
             {"err_q1", m.err_q1},
             {"err_median", m.err_median},
             {"err_q3", m.err_q3}});
    return j;
}

void emit_table(const std::vector<ExperimentReport>& reports, const std::string& format,
                std::ostream& out) {
    if (format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : reports) j.push_back(r.to_json());
        out << j.dump(2) << '\n';
        if (!out) throw IoError("emit_table: write failed");
        return;
    }
    if (format != "csv") throw UnknownId("emit_table: unknown format " + format);

    out << "n,N,h_ex,h_as,h_cv,L2_ex,L2_as,L2_cv\n";
    const char* order[] = {"exact", "asym", "cv"};
    for (const auto& r : reports) {
        out << r.config.n << ',' << r.config.N;
        for (const char* name : order) {
            const MethodSummary* m = find_method(r, name);
            out << ',' << (m ? format_bandwidth(m->h) : "");
        }
        for (const char* name : order) {
            const MethodSummary* m = find_method(r, name);
            out << ',' << (m ? format_l2_cell(*m) : "");
        }
        out << '\n';
    }
    if (!out) throw IoError("emit_table: write failed");
}

std::vector<ExperimentConfig> table_scenarios(const std::string& table_id) {
    ExperimentConfig base;
    base.kernel = "tgauss";
    base.methods = {"exact", "asym", "cv"};
    base.replications = 1000;

    if (table_id == "table1") {
        base.regression = "m1"; base.covariance = "wiener"; base.nu = 0; base.p = 1;
    } else if (table_id == "table2") {
        base.regression = "m1"; base.covariance = "ou:15"; base.nu = 0; base.p = 1;
    } else if (table_id == "table3") {
        base.regression = "m2"; base.covariance = "ou:15"; base.nu = 0; base.p = 1;
    } else if (table_id == "table4") {
        base.regression = "m1"; base.covariance = "wiener"; base.nu = 1; base.p = 1;
    } else if (table_id == "table5") {
        base.regression = "m1"; base.covariance = "wiener"; base.nu = 1; base.p = 2;
    } else {
        throw UnknownId("unknown table id: " + table_id);
    }

    std::vector<ExperimentConfig> out;
    int sizes[] = {10, 50, 100};
    int row = 0;
    for (int n : sizes)
        for (int N : sizes) {
            ExperimentConfig c = base;
            c.n = n;
            c.N = N;
            c.seed = base.seed + static_cast<std::uint64_t>(row++);
            out.push_back(c);
        }
    return out;
}

}  // namespace lpfda
