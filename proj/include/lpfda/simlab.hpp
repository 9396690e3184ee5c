#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lpfda/bandwidth.hpp"
#include "lpfda/covariance.hpp"
#include "lpfda/regression.hpp"

namespace lpfda {

// Signal-to-noise ratio sqrt(n) (max m - min m) / int rho(t,t) dt, the
// variant consistent with the reference scenarios (3.16 for the
// Ornstein-Uhlenbeck noise at n=10, 6.32 for the Wiener noise).
double snr(const RegressionFunction& truth, const CovarianceModel& model, int n);

struct ExperimentConfig {
    std::string regression = "m1";
    std::string covariance = "wiener";
    int n = 10;
    int N = 10;
    int nu = 0;
    int p = 1;
    std::string kernel = "tgauss";
    std::string density = "uniform";
    std::vector<std::string> methods = {"exact", "asym", "cv"};
    int replications = 1000;
    std::uint64_t seed = 20260810;
    int eval_mesh = 0;           // 0: evaluate the L2 error on the design grid
    std::string weight = "uniform";
    std::optional<double> h;     // fixed bandwidth (normality checks)

    void validate() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct MethodSummary {
    std::string method;  // "exact" | "asym" | "cv"
    double h = 0.0;      // selected / formula bandwidth (cv: median over replications)
    double h_fit = 0.0;  // bandwidth the fits actually used (clamped up if infeasible)
    double err_q1 = 0.0;
    double err_median = 0.0;
    double err_q3 = 0.0;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<MethodSummary> methods;
    double snr = 0.0;
    int failed_replications = 0;
    double runtime_seconds = 0.0;  // informational; not part of determinism

    const MethodSummary& method(const std::string& name) const;
    nlohmann::json to_json() const;
};

// Runs the full replication protocol: oracle bandwidths once, then per
// replication a fresh seeded draw of n error paths, optional
// cross-validation, fits with each method's bandwidth, and the L2 error by
// Simpson over the evaluation mesh. Deterministic for a given master seed,
// independent of the worker count. Throws if more than 1% of replications
// fail.
ExperimentReport run_experiment(const ExperimentConfig& config, int workers = 0);

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
};

// One-sample Kolmogorov-Smirnov test against the standard normal law.
KsResult ks_test_standard_normal(std::vector<double> samples);

// Monte Carlo check of the limiting normal law at a point: simulates M
// standardized estimates (estimate - truth) sqrt(n h^r) / sigma and tests
// them against N(0,1). Requires config.h; throws ConditionViolated when the
// bandwidth-decay condition fails at (n, h).
KsResult normality_check(const ExperimentConfig& config, double x, int M);

// Median-unbiased (Hyndman-Fan type 8) quantile of a sample.
double quantile_type8(std::vector<double> values, double prob);

// Renders reports in the reference table layout (columns n, N, h_ex, h_as,
// h_cv, then the three L2 cells "median (q1-q3)"); format "csv" or "json".
// Bandwidths print with two decimals, unbounded as "inf".
void emit_table(const std::vector<ExperimentReport>& reports, const std::string& format,
                std::ostream& out);

struct L2Cell {
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
};
// Parses an L2 table cell "0.031 (0.015-0.061)".
L2Cell parse_l2_cell(const std::string& cell);

// Built-in scenario sets reproducing the reference tables: all (n, N) in
// {10, 50, 100}^2 for a fixed regression/covariance/estimator combination.
//   table1: m1, wiener, nu=0, p=1     table2: m1, ou:15, nu=0, p=1
//   table3: m2, ou:15, nu=0, p=1      table4: m1, wiener, nu=1, p=1
//   table5: m1, wiener, nu=1, p=2
std::vector<ExperimentConfig> table_scenarios(const std::string& table_id);

}  // namespace lpfda
