#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "lpfda/asymptotics.hpp"
#include "lpfda/bandwidth.hpp"
#include "lpfda/errors.hpp"
#include "lpfda/io.hpp"
#include "lpfda/simlab.hpp"

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

json bandwidth_to_json(const lpfda::BandwidthResult& r) {
    json j;
    j["h"] = std::isinf(r.h) ? json("inf") : json(r.h);
    j["method"] = r.method;
    j["h_floor"] = r.h_floor;
    j["skipped_candidates"] = r.skipped_candidates;
    json curve = json::array();
    for (const auto& [h, score] : r.objective)
        curve.push_back({{"h", std::isinf(h) ? json("inf") : json(h)}, {"score", score}});
    j["objective"] = curve;
    return j;
}

std::vector<double> parse_eval_spec(const std::string& spec, const lpfda::DesignGrid& grid) {
    if (spec == "design") return grid.points;
    if (spec.rfind("uniform:", 0) == 0) {
        int M = std::stoi(spec.substr(8));
        if (M < 2) throw lpfda::Error("--eval uniform:<M> needs M >= 2");
        std::vector<double> xs(M);
        for (int i = 0; i < M; ++i) xs[i] = static_cast<double>(i) / (M - 1);
        return xs;
    }
    throw lpfda::UnknownId("unknown eval spec: " + spec + " (use design | uniform:<M>)");
}

void write_or_print(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw lpfda::IoError("cannot write " + path);
    out << text;
}

int run(int argc, char** argv) {
    CLI::App app{"Local polynomial regression for repeatedly observed curves: "
                 "estimation, bandwidth selection, and a simulation laboratory"};
    app.require_subcommand(1);
    // "--h" is a real option below; keep help on --help only.
    app.set_help_flag("--help", "Print help");

    // kernel-info
    auto* kinfo = app.add_subcommand("kernel-info", "Print a kernel tableau as JSON");
    std::string ki_kernel = "epanechnikov";
    int ki_p = 1;
    kinfo->add_option("--kernel", ki_kernel, "kernel id");
    kinfo->add_option("--p", ki_p, "fit order (0..4)");

    // fit
    auto* fit = app.add_subcommand("fit", "Fit averaged curves from a CSV file");
    fit->set_help_flag("--help", "Print help");
    std::string f_input, f_output = "-", f_h = "cv", f_kernel = "tgauss", f_eval = "design";
    int f_p = 1, f_nu = 0;
    fit->add_option("--input", f_input, "curves CSV")->required();
    fit->add_option("--p", f_p, "fit order");
    fit->add_option("--nu", f_nu, "derivative order");
    fit->add_option("--h", f_h, "bandwidth: number | inf | cv | asym");
    fit->add_option("--kernel", f_kernel, "kernel id");
    fit->add_option("--eval", f_eval, "evaluation grid: design | uniform:<M>");
    fit->add_option("--output", f_output, "estimate CSV (default stdout)");

    // bandwidth
    auto* bw = app.add_subcommand("bandwidth", "Select a bandwidth; prints JSON");
    std::string b_method, b_model = "wiener", b_m = "m1", b_kernel = "tgauss", b_input;
    int b_n = 10, b_N = 100, b_nu = 0, b_p = 1;
    bw->add_option("--method", b_method, "exact | asym | cv | plugin")->required();
    bw->add_option("--model", b_model, "covariance id (exact/asym)");
    bw->add_option("--m", b_m, "regression id (exact/asym)");
    bw->add_option("--n", b_n, "number of curves (exact/asym)");
    bw->add_option("--N", b_N, "design size (exact/asym)");
    bw->add_option("--nu", b_nu, "derivative order");
    bw->add_option("--p", b_p, "fit order");
    bw->add_option("--kernel", b_kernel, "kernel id");
    bw->add_option("--input", b_input, "curves CSV (cv/plugin)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo experiment from a JSON config");
    std::string s_config, s_out = "-", s_format = "csv";
    int s_workers = 0;
    std::uint64_t s_seed = 0;
    bool s_seed_set = false;
    sim->add_option("--config", s_config, "experiment config JSON")->required();
    sim->add_option("--out", s_out, "output file (default stdout)");
    sim->add_option("--format", s_format, "csv | json");
    sim->add_option("--workers", s_workers, "worker threads (0 = all cores)");
    sim->add_option("--seed", s_seed, "override the config seed")
        ->each([&](const std::string&) { s_seed_set = true; });

    // table
    auto* tab = app.add_subcommand("table", "Reproduce a built-in scenario table");
    std::string t_id, t_out = "-", t_format = "csv", t_rows;
    int t_workers = 0, t_reps = 0;
    tab->add_option("--reproduce", t_id, "table1 | table2 | table3 | table4 | table5")
        ->required();
    tab->add_option("--out", t_out, "output file (default stdout)");
    tab->add_option("--format", t_format, "csv | json");
    tab->add_option("--workers", t_workers, "worker threads (0 = all cores)");
    tab->add_option("--replications", t_reps, "override replication count");
    tab->add_option("--rows", t_rows, "filter rows, e.g. 10:10,50:50");

    // make-sample
    auto* mk = app.add_subcommand("make-sample", "Write synthetic curves to a CSV file");
    std::string mk_reg = "m1", mk_cov = "wiener", mk_density = "uniform", mk_out;
    int mk_n = 10, mk_N = 50;
    std::uint64_t mk_seed = 1;
    mk->add_option("--regression", mk_reg, "regression id");
    mk->add_option("--covariance", mk_cov, "covariance id");
    mk->add_option("--density", mk_density, "sampling density id");
    mk->add_option("--n", mk_n, "number of curves");
    mk->add_option("--N", mk_N, "design size");
    mk->add_option("--seed", mk_seed, "rng seed");
    mk->add_option("--out", mk_out, "output CSV")->required();

    CLI11_PARSE(app, argc, argv);

    if (kinfo->parsed()) {
        lpfda::Kernel kernel = lpfda::Kernel::parse(ki_kernel);
        const lpfda::KernelTableau& t = lpfda::tableau(kernel, ki_p);
        json j;
        j["kernel"] = kernel.name();
        j["tau"] = kernel.tau();
        j["lipschitz_bound"] = kernel.lipschitz_bound();
        j["p"] = t.p;
        j["moments"] = t.moments;
        j["c"] = vector_to_json(t.c);
        j["c_tilde"] = vector_to_json(t.c_tilde);
        j["S"] = matrix_to_json(t.S);
        j["S_tilde"] = matrix_to_json(t.S_tilde);
        j["S_star"] = matrix_to_json(t.S_star);
        j["A"] = matrix_to_json(t.A);
        j["B"] = matrix_to_json(t.B);
        j["A1"] = matrix_to_json(t.A1);
        j["A2"] = matrix_to_json(t.A2);
        j["A3"] = matrix_to_json(t.A3);
        for (int nu = 0; nu <= t.p; ++nu) {
            json forms;
            forms["bias_leading"] = t.bias_leading_form(nu);
            forms["bias_second"] = t.bias_second_form(nu);
            forms["design"] = t.design_form(nu);
            forms["var_leading"] = t.var_leading_form(nu);
            forms["var_roughness"] = t.var_roughness_form(nu);
            forms["var_curvature"] = t.var_curvature_form(nu);
            forms["var_mixed"] = t.var_mixed_form(nu);
            forms["var_mixed4"] = t.var_mixed4_form(nu);
            j["forms"]["nu" + std::to_string(nu)] = forms;
        }
        std::cout << j.dump(2) << '\n';
        return 0;
    }

    if (fit->parsed()) {
        lpfda::FunctionalSample sample = lpfda::read_curves_csv(f_input);
        lpfda::Kernel kernel = lpfda::Kernel::parse(f_kernel);
        double h;
        if (f_h == "inf") {
            h = lpfda::kUnboundedBandwidth;
        } else if (f_h == "cv") {
            h = lpfda::cross_validate(sample, f_p, kernel).h;
        } else if (f_h == "asym") {
            h = lpfda::plugin_bandwidth(sample, f_nu, f_p, kernel).h;
        } else {
            h = std::stod(f_h);
        }
        lpfda::FitSpec spec{f_p, f_nu, h, kernel};
        auto curve = lpfda::curve_estimate(sample, spec, parse_eval_spec(f_eval, sample.grid));
        if (f_output.empty() || f_output == "-") {
            std::ostringstream ss;
            ss << "x,estimate\n";
            for (const auto& [x, v] : curve) ss << x << ',' << v << '\n';
            std::cout << ss.str();
        } else {
            lpfda::write_estimate_csv(curve, f_output);
        }
        std::cerr << "h = " << (std::isinf(h) ? std::string("inf") : std::to_string(h)) << '\n';
        return 0;
    }

    if (bw->parsed()) {
        lpfda::Kernel kernel = lpfda::Kernel::parse(b_kernel);
        json j;
        if (b_method == "exact" || b_method == "asym") {
            lpfda::RegressionFunction truth = lpfda::regression_catalog(b_m);
            lpfda::CovarianceModel model = lpfda::CovarianceModel::parse(b_model);
            lpfda::DesignGrid grid =
                lpfda::quantile_grid(lpfda::SamplingDensity::uniform(), b_N);
            if (b_method == "exact") {
                j = bandwidth_to_json(lpfda::exact_optimal_bandwidth(truth, model, grid, b_n,
                                                                     b_nu, b_p, kernel));
            } else {
                const lpfda::KernelTableau& t = lpfda::tableau(kernel, b_p);
                double h = lpfda::h_opt_global(t, model, truth, nullptr, b_n, b_nu, b_p);
                j["h"] = h;
                j["method"] = "asymptotic";
                j["constants"] = {{"mu2", t.mu(2)},
                                  {"mu4", t.mu(4)},
                                  {"bias_leading_form", t.bias_leading_form(b_nu)},
                                  {"var_roughness_form", t.var_roughness_form(b_nu)},
                                  {"abs_cross_moment_uv", 2.0 * t.A(1, 1)}};
            }
        } else if (b_method == "cv" || b_method == "plugin") {
            if (b_input.empty()) throw lpfda::Error("--input is required for cv/plugin");
            lpfda::FunctionalSample sample = lpfda::read_curves_csv(b_input);
            j = bandwidth_to_json(b_method == "cv"
                                      ? lpfda::cross_validate(sample, b_p, kernel)
                                      : lpfda::plugin_bandwidth(sample, b_nu, b_p, kernel));
        } else {
            throw lpfda::UnknownId("unknown bandwidth method: " + b_method);
        }
        std::cout << j.dump(2) << '\n';
        return 0;
    }

    if (sim->parsed()) {
        std::ifstream in(s_config);
        if (!in) throw lpfda::IoError("cannot open " + s_config);
        json cfg_json = json::parse(in);
        lpfda::ExperimentConfig config = lpfda::ExperimentConfig::from_json(cfg_json);
        if (s_seed_set) config.seed = s_seed;
        lpfda::ExperimentReport report = lpfda::run_experiment(config, s_workers);
        std::ostringstream ss;
        lpfda::emit_table({report}, s_format, ss);
        write_or_print(s_out, ss.str());
        return 0;
    }

    if (tab->parsed()) {
        std::vector<lpfda::ExperimentConfig> configs = lpfda::table_scenarios(t_id);
        if (!t_rows.empty()) {
            std::vector<lpfda::ExperimentConfig> keep;
            std::stringstream ss(t_rows);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                auto colon = tok.find(':');
                if (colon == std::string::npos)
                    throw lpfda::Error("--rows entries look like n:N");
                int n = std::stoi(tok.substr(0, colon));
                int N = std::stoi(tok.substr(colon + 1));
                for (const auto& c : configs)
                    if (c.n == n && c.N == N) keep.push_back(c);
            }
            configs = std::move(keep);
        }
        std::vector<lpfda::ExperimentReport> reports;
        for (auto& c : configs) {
            if (t_reps > 0) c.replications = t_reps;
            reports.push_back(lpfda::run_experiment(c, t_workers));
            std::cerr << "done n=" << c.n << " N=" << c.N << " ("
                      << reports.back().runtime_seconds << " s)\n";
        }
        std::ostringstream ss;
        lpfda::emit_table(reports, t_format, ss);
        write_or_print(t_out, ss.str());
        return 0;
    }

    if (mk->parsed()) {
        lpfda::RegressionFunction truth = lpfda::regression_catalog(mk_reg);
        lpfda::CovarianceModel model = lpfda::CovarianceModel::parse(mk_cov);
        lpfda::DesignGrid grid =
            lpfda::quantile_grid(lpfda::SamplingDensity::parse(mk_density), mk_N);
        lpfda::GaussianPathSampler sampler(model, grid.points);
        lpfda::FunctionalSample sample;
        sample.values = sampler.sample(mk_n, mk_seed);
        for (int j = 0; j < grid.size(); ++j)
            sample.values.col(j).array() += truth(grid.points[j]);
        sample.grid = std::move(grid);
        lpfda::write_curves_csv(sample, mk_out);
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const lpfda::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
