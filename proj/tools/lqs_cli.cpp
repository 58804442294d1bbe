// Batch front end: fit one instance, generate synthetic data, run a
// benchmark grid, run the aggregation pipeline, or verify a report.

#include "lqs/bench.hpp"
#include "lqs/datagen.hpp"
#include "lqs/formulations.hpp"
#include "lqs/oracle.hpp"
#include "lqs/scale.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <optional>

using namespace lqs;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitSolverConfig = 3;

struct DataArgs {
    std::string path;
    std::string y_column;
    std::vector<std::string> x_columns;
    bool intercept = false;
};

Dataset load_data(const DataArgs& args) {
    if (args.path.size() >= 6 &&
        args.path.substr(args.path.size() - 6) == ".jsonl")
        return load_instance(args.path).data;
    if (args.y_column.empty() || args.x_columns.empty())
        throw CLI::ValidationError(
            "--data", "CSV input needs --y and --x column selections");
    return load_csv(args.path, args.y_column, args.x_columns, args.intercept);
}

SolverConfig resolve_solver(const std::string& config_path) {
    SolverConfig cfg = config_path.empty() ? SolverConfig::defaults()
                                           : SolverConfig::from_file(config_path);
    if (cfg.command.empty() && cfg.server_command.empty())
        throw std::runtime_error("no solver command configured");
    return cfg;
}

FormulationTag tag_from_name(const std::string& name) {
    for (FormulationTag tag :
         {FormulationTag::Bm, FormulationTag::SlPerm, FormulationTag::SlCount,
          FormulationTag::SlBigm, FormulationTag::Ksum, FormulationTag::Bilevel})
        if (formulation_name(tag) == name) return tag;
    throw CLI::ValidationError("--formulation", "unknown formulation '" + name + "'");
}

std::string status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::FeasibleTimeout: return "feasible-timeout";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Error: return "error";
    }
    return "?";
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

json fit_report(const Dataset& d, const FitResult& fit) {
    json report = {
        {"formulation", fit.formulation},
        {"q", fit.q},
        {"n", d.n()},
        {"p", d.p()},
        {"status", status_name(fit.status)},
        {"time", fit.time_total},
        {"time_ub", fit.time_to_best},
    };
    if (fit.status == SolveStatus::Optimal ||
        fit.status == SolveStatus::FeasibleTimeout) {
        CertificateReport cert = certify(d, fit.q, fit);
        report["beta"] = fit.beta;
        report["objective"] = fit.objective;
        report["bound"] = fit.bound;
        report["solver_objective"] = fit.solver_objective;
        report["mismatch"] = fit.objective_mismatch;
        report["cut_rounds"] = fit.cut_rounds;
        report["certificate"] = {
            {"recomputed", cert.recomputed},
            {"count_le", cert.count_le},
            {"count_lt", cert.count_lt},
            {"order_statistic_ok", cert.order_statistic_ok},
        };
    } else {
        report["message"] = fit.message;
    }
    return report;
}

int cmd_fit(const DataArgs& data_args, std::size_t q, const std::string& name,
            const std::string& cut_mode_name, double time_limit, double eta,
            const std::string& solver_config, long seed, bool valid_inequality,
            const std::string& out_path) {
    if (name == "strongdual") {
        std::cerr << "formulation 'strongdual' is unsupported: the "
                     "strong-duality reformulation carries bilinear products "
                     "of residual magnitudes and dual prices that no McCormick "
                     "envelope can linearize; pick 'bilevel' instead\n";
        return 1;
    }
    Dataset d = load_data(data_args);
    FormulationTag tag = tag_from_name(name);

    std::unique_ptr<MilpSolver> solver;
    try {
        solver = make_solver(resolve_solver(solver_config));
    } catch (const std::exception& e) {
        std::cerr << "solver configuration error: " << e.what() << "\n";
        return kExitSolverConfig;
    }

    BigMBounds bounds = derive_default_bounds(d, *solver, eta);
    FormulationArtifact artifact;
    switch (tag) {
        case FormulationTag::Bm: artifact = build_bm(d, q, bounds); break;
        case FormulationTag::SlPerm: {
            SortingCutMode mode = SortingCutMode::CoefficientSort;
            if (cut_mode_name == "lemma1-static") mode = SortingCutMode::Lemma1Static;
            else if (cut_mode_name == "lemma1-iterative")
                mode = SortingCutMode::Lemma1Iterative;
            else if (cut_mode_name != "coefficient-sort")
                throw CLI::ValidationError("--cut-mode",
                                           "unknown mode '" + cut_mode_name + "'");
            artifact = build_sl_perm(d, q, mode, bounds);
            break;
        }
        case FormulationTag::SlCount: artifact = build_sl_count(d, q, bounds); break;
        case FormulationTag::SlBigm: artifact = build_sl_bigm(d, q, bounds); break;
        case FormulationTag::Ksum:
            artifact = build_ksum(d, q, bounds, valid_inequality);
            break;
        case FormulationTag::Bilevel:
            artifact = build_bilevel_indicator(d, q, bounds);
            break;
        default: throw CLI::ValidationError("--formulation", "unsupported");
    }

    SolveParams params;
    params.time_limit = time_limit;
    params.seed = seed;
    FitResult fit = solve_formulation(artifact, d, *solver, params);
    write_output(out_path, fit_report(d, fit).dump(2) + "\n");
    return fit.status == SolveStatus::Error ? 1 : 0;
}

int cmd_generate(std::size_t n, std::size_t p, double pi, const std::string& kind,
                 std::uint64_t seed, const std::string& sigma_mode,
                 const std::string& out_path) {
    SyntheticSpec spec;
    spec.n = n;
    spec.p = p;
    spec.pi = pi;
    spec.kind = kind == "A" ? CorruptionKind::A : CorruptionKind::B;
    spec.seed = seed;
    spec.sigma_mode =
        sigma_mode == "stddev" ? SigmaMode::StdDev : SigmaMode::Variance;
    SyntheticInstance inst = generate_synthetic(spec);
    write_output(out_path, instance_to_string(inst));
    return 0;
}

int cmd_bench(std::size_t n, std::size_t p, const std::vector<std::size_t>& qs,
              double pi, const std::vector<std::string>& kinds,
              std::size_t seed_count, std::uint64_t seed_base,
              const std::vector<std::string>& formulations, double time_limit,
              double eta, std::size_t workers, const std::string& solver_config,
              const std::string& out_path, const std::string& cells_path,
              const std::string& plot_path) {
    BenchGrid grid;
    grid.n = n;
    grid.p = p;
    grid.q_values = qs;
    grid.pi = pi;
    for (const std::string& k : kinds)
        grid.kinds.push_back(k == "A" ? CorruptionKind::A : CorruptionKind::B);
    grid.seed_base = seed_base;
    grid.seed_count = seed_count;
    for (const std::string& f : formulations)
        grid.formulations.push_back(tag_from_name(f));

    BenchOptions options;
    options.time_limit = time_limit;
    options.eta = eta;
    options.workers = workers;
    try {
        options.solver = resolve_solver(solver_config);
    } catch (const std::exception& e) {
        std::cerr << "solver configuration error: " << e.what() << "\n";
        return kExitSolverConfig;
    }

    BenchResults results = run_bench(grid, options);
    write_output(out_path, bench_records_csv(results));
    if (!cells_path.empty()) write_output(cells_path, bench_cells_csv(results));
    if (!plot_path.empty()) write_output(plot_path, bench_plot_data(results));
    for (const BenchRecord& rec : results.records)
        if (rec.status == SolveStatus::Error)
            std::cerr << "warning: " << formulation_name(rec.formulation) << " seed "
                      << rec.seed << " failed: " << rec.error << "\n";
    return 0;
}

int cmd_scale(const std::string& data_path, std::size_t k, std::size_t q,
              double time_limit, double exact_time_limit, std::uint64_t seed,
              double eta, const std::string& radius_mode,
              const std::string& solver_config, const std::string& out_path) {
    Dataset d = load_instance(data_path).data;
    std::unique_ptr<MilpSolver> solver;
    try {
        solver = make_solver(resolve_solver(solver_config));
    } catch (const std::exception& e) {
        std::cerr << "solver configuration error: " << e.what() << "\n";
        return kExitSolverConfig;
    }

    BigMBounds box = derive_default_bounds(d, *solver, eta);
    AggregateDataset agg = aggregate(d, k, seed);
    const RadiusMode mode = radius_mode == "geometric" ? RadiusMode::Geometric
                                                       : RadiusMode::BetaBox;
    agg.radius = compute_D(d, agg, box, mode);

    BigMBounds rep_bounds = derive_bigm_bounds(agg.reps, box.beta0, eta);
    FormulationArtifact weighted = build_weighted_formulation(agg, q, rep_bounds);
    SolveParams params;
    params.time_limit = time_limit;
    FitResult agg_fit = solve_formulation(weighted, agg.reps, *solver, params);

    json report = {
        {"k", agg.k()},
        {"q", q},
        {"n", d.n()},
        {"D", agg.radius},
        {"radius_mode", radius_mode},
        {"status", status_name(agg_fit.status)},
    };
    int rc = 0;
    if (agg_fit.status == SolveStatus::Optimal ||
        agg_fit.status == SolveStatus::FeasibleTimeout) {
        const double fq_original =
            qth_abs_residual(residuals(d, agg_fit.beta).s, q);
        report["beta"] = agg_fit.beta;
        report["objective_aggregate"] = agg_fit.objective;
        report["fq_on_original"] = fq_original;
        report["bound_2d"] = 2.0 * agg.radius;
        if (exact_time_limit > 0.0) {
            FormulationArtifact exact = build_bilevel_indicator(d, q, box);
            SolveParams exact_params;
            exact_params.time_limit = exact_time_limit;
            FitResult exact_fit = solve_formulation(exact, d, *solver, exact_params);
            if (exact_fit.status == SolveStatus::Optimal ||
                exact_fit.status == SolveStatus::FeasibleTimeout) {
                Theorem2Check check =
                    theorem2_check(exact_fit.objective, fq_original, agg.radius);
                report["exact_objective"] = exact_fit.objective;
                report["exact_bound"] = exact_fit.bound;
                report["exact_status"] = status_name(exact_fit.status);
                report["bound_check"] = check.pass ? "pass" : "fail";
                // certified variant: distance to the proven lower bound
                report["bound_check_certified"] =
                    (fq_original - std::max(exact_fit.bound, 0.0) <=
                     2.0 * agg.radius + 1e-6)
                        ? "pass"
                        : "fail";
                if (!check.pass) rc = 1;
            } else {
                report["exact_status"] = status_name(exact_fit.status);
                report["bound_check"] = "not-checked";
            }
        }
    } else {
        report["message"] = agg_fit.message;
        rc = 1;
    }
    write_output(out_path, report.dump(2) + "\n");
    return rc;
}

int cmd_verify(const DataArgs& data_args, const std::string& report_path) {
    Dataset d = load_data(data_args);
    std::ifstream in(report_path);
    if (!in) throw std::runtime_error("cannot open report " + report_path);
    json report = json::parse(in);

    FitResult fit;
    fit.beta = report.at("beta").get<std::vector<double>>();
    fit.objective = report.at("objective").get<double>();
    fit.q = report.at("q").get<std::size_t>();
    CertificateReport cert = verify_fit(d, fit.q, fit);
    std::cout << "recomputed " << cert.recomputed << "\n"
              << "count_le " << cert.count_le << "\n"
              << "count_lt " << cert.count_lt << "\n"
              << (cert.objective_matches && cert.order_statistic_ok
                      ? "certificate PASS"
                      : "certificate FAIL")
              << "\n";
    return cert.objective_matches && cert.order_statistic_ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact least-quantile regression toolkit"};
    app.require_subcommand(1);

    // fit
    auto* fit = app.add_subcommand("fit", "solve one instance with one formulation");
    DataArgs fit_data;
    std::size_t fit_q = 0;
    std::string fit_formulation, fit_cut_mode = "coefficient-sort", fit_solver,
                fit_out;
    double fit_time_limit = 7200.0, fit_eta = 1.5;
    long fit_seed = 0;
    bool fit_no_vi = false;
    fit->add_option("--data", fit_data.path, "CSV or .jsonl instance")->required();
    fit->add_option("--y", fit_data.y_column, "response column (CSV)");
    fit->add_option("--x", fit_data.x_columns, "covariate columns (CSV)")
        ->delimiter(',');
    fit->add_flag("--intercept", fit_data.intercept, "prepend an all-ones column");
    fit->add_option("--q", fit_q, "order statistic rank")->required();
    fit->add_option("--formulation", fit_formulation,
                    "bm|slperm|slcount|slbigm|ksum|bilevel")
        ->required();
    fit->add_option("--cut-mode", fit_cut_mode,
                    "slperm ordering: coefficient-sort|lemma1-static|lemma1-iterative");
    fit->add_option("--time-limit", fit_time_limit, "seconds");
    fit->add_option("--eta", fit_eta, "bound inflation factor in [1,2]");
    fit->add_option("--solver", fit_solver, "solver config file");
    fit->add_option("--seed", fit_seed, "solver seed");
    fit->add_flag("--no-valid-inequality", fit_no_vi,
                  "drop the tail-sum strengthening row (ksum)");
    fit->add_option("--out", fit_out, "report path (default stdout)");

    // generate
    auto* gen = app.add_subcommand("generate", "write a synthetic instance");
    std::size_t gen_n = 50, gen_p = 5;
    double gen_pi = 0.4;
    std::string gen_kind = "A", gen_sigma = "variance", gen_out;
    std::uint64_t gen_seed = 1;
    gen->add_option("--n", gen_n, "observations")->required();
    gen->add_option("--p", gen_p, "covariates")->required();
    gen->add_option("--pi", gen_pi, "corrupted fraction");
    gen->add_option("--type", gen_kind, "A|B")
        ->check(CLI::IsMember({"A", "B"}));
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--sigma-mode", gen_sigma, "variance|stddev")
        ->check(CLI::IsMember({"variance", "stddev"}));
    gen->add_option("--out", gen_out, "output path (default stdout)");

    // bench
    auto* bench = app.add_subcommand("bench", "run a benchmark grid");
    std::size_t bench_n = 50, bench_p = 5, bench_seeds = 20, bench_workers = 1;
    double bench_pi = 0.4, bench_time = 600.0, bench_eta = 1.5;
    std::uint64_t bench_seed_base = 1;
    std::vector<std::size_t> bench_q;
    std::vector<std::string> bench_kinds{"A", "B"};
    std::vector<std::string> bench_formulations{"bm", "slbigm", "bilevel"};
    std::string bench_solver, bench_out, bench_cells, bench_plot;
    bench->add_option("--n", bench_n, "observations");
    bench->add_option("--p", bench_p, "covariates");
    bench->add_option("--q", bench_q, "ranks")->required()->delimiter(',');
    bench->add_option("--pi", bench_pi, "corrupted fraction");
    bench->add_option("--types", bench_kinds, "corruption kinds")->delimiter(',');
    bench->add_option("--seeds", bench_seeds, "number of seeds");
    bench->add_option("--seed-base", bench_seed_base, "first seed");
    bench->add_option("--formulations", bench_formulations, "methods")
        ->delimiter(',');
    bench->add_option("--time-limit", bench_time, "per-solve cap, seconds");
    bench->add_option("--eta", bench_eta, "bound inflation factor");
    bench->add_option("--workers", bench_workers, "parallel solves");
    bench->add_option("--solver", bench_solver, "solver config file");
    bench->add_option("--out", bench_out, "raw per-solve CSV")->required();
    bench->add_option("--cells", bench_cells, "aggregated table CSV");
    bench->add_option("--plot-data", bench_plot, "plot-ready CSV");

    // scale
    auto* scale = app.add_subcommand("scale", "aggregate, solve, check the bound");
    std::string scale_data, scale_solver, scale_out, scale_radius = "beta-box";
    std::size_t scale_k = 100, scale_q = 0;
    double scale_time = 7200.0, scale_exact_time = 0.0, scale_eta = 1.5;
    std::uint64_t scale_seed = 1;
    scale->add_option("--data", scale_data, ".jsonl instance")->required();
    scale->add_option("--k", scale_k, "number of clusters");
    scale->add_option("--q", scale_q, "order statistic rank")->required();
    scale->add_option("--time-limit", scale_time, "aggregate solve cap");
    scale->add_option("--exact-time-limit", scale_exact_time,
                      "also solve the full instance with this cap");
    scale->add_option("--seed", scale_seed, "clustering seed");
    scale->add_option("--eta", scale_eta, "bound inflation factor");
    scale->add_option("--radius-mode", scale_radius, "beta-box|geometric")
        ->check(CLI::IsMember({"beta-box", "geometric"}));
    scale->add_option("--solver", scale_solver, "solver config file");
    scale->add_option("--out", scale_out, "report path (default stdout)");

    // verify
    auto* verify = app.add_subcommand("verify", "re-check a fit report");
    DataArgs verify_data;
    std::string verify_report;
    verify->add_option("--data", verify_data.path, "CSV or .jsonl instance")
        ->required();
    verify->add_option("--y", verify_data.y_column, "response column (CSV)");
    verify->add_option("--x", verify_data.x_columns, "covariate columns (CSV)")
        ->delimiter(',');
    verify->add_flag("--intercept", verify_data.intercept, "all-ones column");
    verify->add_option("--report", verify_report, "fit report JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (fit->parsed())
            return cmd_fit(fit_data, fit_q, fit_formulation, fit_cut_mode,
                           fit_time_limit, fit_eta, fit_solver, fit_seed,
                           !fit_no_vi, fit_out);
        if (gen->parsed())
            return cmd_generate(gen_n, gen_p, gen_pi, gen_kind, gen_seed, gen_sigma,
                                gen_out);
        if (bench->parsed())
            return cmd_bench(bench_n, bench_p, bench_q, bench_pi, bench_kinds,
                             bench_seeds, bench_seed_base, bench_formulations,
                             bench_time, bench_eta, bench_workers, bench_solver,
                             bench_out, bench_cells, bench_plot);
        if (scale->parsed())
            return cmd_scale(scale_data, scale_k, scale_q, scale_time,
                             scale_exact_time, scale_seed, scale_eta, scale_radius,
                             scale_solver, scale_out);
        if (verify->parsed()) return cmd_verify(verify_data, verify_report);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
