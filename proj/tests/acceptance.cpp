// Acceptance suite: every release criterion as an executable check, one
// PASS/FAIL/SKIP line each. Run all criteria or a subset:
//   acceptance [--criterion N]... [--data-dir PATH]
// Criterion 1 needs the external reference datasets (see data/README.md)
// and reports SKIP when they are absent; criterion 2 is the
// property-based substitute that always runs.

#include "lqs/baselines.hpp"
#include "lqs/bench.hpp"
#include "lqs/datagen.hpp"
#include "lqs/formulations.hpp"
#include "lqs/oracle.hpp"
#include "lqs/scale.hpp"

#include "support/enum_milp.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace lqs;

namespace {

enum class Outcome { Pass, Fail, Skip };

struct Criterion {
    int id;
    const char* title;
    Outcome (*run)(const std::string& data_dir, std::string& detail);
};

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

std::size_t bench_workers() {
    const char* env = std::getenv("LQS_BENCH_WORKERS");
    if (!env) return 2;
    const long v = std::strtol(env, nullptr, 10);
    return v >= 1 ? static_cast<std::size_t>(v) : 1;
}

// Bounds with the documented escalation: start at eta = 1.5 and retry at
// 2.0 when a known-good fit falls outside the box.
BigMBounds bounds_for(const Dataset& d, MilpSolver& solver,
                      const std::vector<double>* must_contain,
                      bool* bound_violation) {
    BigMBounds b = derive_default_bounds(d, solver, 1.5);
    if (must_contain && !b.contains(*must_contain)) {
        b = derive_default_bounds(d, solver, 2.0);
        if (!b.contains(*must_contain) && bound_violation) *bound_violation = true;
    }
    return b;
}

struct MethodRun {
    std::string label;
    FitResult fit;
};

std::vector<MethodRun> run_all_formulations(const Dataset& d, std::size_t q,
                                            const BigMBounds& b,
                                            MilpSolver& solver,
                                            const SolveParams& params,
                                            bool include_perm,
                                            bool include_perm_cut_modes) {
    std::vector<MethodRun> runs;
    auto add = [&](const char* label, FormulationArtifact art) {
        runs.push_back({label, solve_formulation(art, d, solver, params)});
    };
    add("bm", build_bm(d, q, b));
    add("slcount", build_sl_count(d, q, b));
    add("slbigm", build_sl_bigm(d, q, b));
    add("ksum", build_ksum(d, q, b, true));
    add("bilevel", build_bilevel_indicator(d, q, b));
    if (include_perm) {
        add("slperm/coef", build_sl_perm(d, q, SortingCutMode::CoefficientSort, b));
        if (include_perm_cut_modes) {
            add("slperm/static",
                build_sl_perm(d, q, SortingCutMode::Lemma1Static, b));
            add("slperm/lazy",
                build_sl_perm(d, q, SortingCutMode::Lemma1Iterative, b));
        }
    }
    return runs;
}

// ---------------------------------------------------------------- 1 ----
Outcome criterion1(const std::string& data_dir, std::string& detail) {
    struct Target {
        const char* file;
        std::vector<std::string> covariates;
        bool intercept;
        std::size_t q;
        double optimum;
        const char* label;
    };
    const std::vector<Target> targets = {
        {"alcohol.csv", {"x1", "x2", "x4", "x5", "x6"}, false, 31, 0.196,
         "alcohol p=5 q=31"},
        {"alcohol.csv", {"x1", "x2", "x3", "x4", "x5", "x6"}, true, 31, 0.156,
         "alcohol p=7 q=31"},
        {"hbk.csv", {"x1", "x2", "x3"}, false, 45, 0.585, "hbk q=45"},
        {"hbk.csv", {"x1", "x2", "x3"}, false, 60, 0.819, "hbk q=60"},
    };
    for (const Target& t : targets) {
        if (!std::filesystem::exists(data_dir + "/" + t.file)) {
            detail = "reference datasets not present under " + data_dir +
                     "; criterion 2 substitutes (see data/README.md)";
            return Outcome::Skip;
        }
    }

    auto solver = make_solver();
    SolveParams params;
    params.time_limit = 7200.0;
    std::ostringstream log;
    bool ok = true;
    for (const Target& t : targets) {
        Dataset d = load_csv(data_dir + "/" + t.file, "y", t.covariates, t.intercept);
        bool violation = false;
        BigMBounds b = bounds_for(d, *solver, nullptr, &violation);
        struct Entry {
            const char* label;
            FormulationArtifact art;
            bool needs_proof;
        };
        std::vector<Entry> entries;
        entries.push_back({"bm", build_bm(d, t.q, b), true});
        entries.push_back({"slcount", build_sl_count(d, t.q, b), true});
        entries.push_back({"slbigm", build_sl_bigm(d, t.q, b), true});
        entries.push_back({"bilevel", build_bilevel_indicator(d, t.q, b), true});
        // the tail-sum model must reach the same incumbent even if its
        // bound never closes
        entries.push_back({"ksum", build_ksum(d, t.q, b, true), false});
        for (Entry& e : entries) {
            FitResult fit = solve_formulation(e.art, d, *solver, params);
            const bool value_ok = fit.has_incumbent() &&
                                  std::abs(fit.objective - t.optimum) <= 1e-3;
            if (!value_ok || (e.needs_proof && fit.status != SolveStatus::Optimal)) {
                ok = false;
                log << t.label << " " << e.label << ": status "
                    << static_cast<int>(fit.status) << " objective "
                    << fit.objective << " (want " << t.optimum << "); ";
            }
        }
    }
    detail = ok ? "all reference optima reproduced within 1e-3" : log.str();
    return ok ? Outcome::Pass : Outcome::Fail;
}

// ---------------------------------------------------------------- 2 ----
Outcome criterion2(const std::string&, std::string& detail) {
    const double t0 = now_seconds();
    auto solver = make_solver();
    SolveParams params;
    params.time_limit = 120.0;
    Rng rng(20240202);
    std::ostringstream log;
    bool ok = true;
    int checked = 0;
    for (int trial = 0; trial < 50 && ok; ++trial) {
        const std::size_t n = 6 + rng.below(15);                  // up to 20
        const std::size_t p = 1 + rng.below(3);                   // up to 3
        SyntheticSpec spec;
        spec.n = std::max(n, p + 2);
        spec.p = p;
        spec.pi = 0.1 + 0.3 * rng.uniform();
        spec.kind = rng.uniform() < 0.5 ? CorruptionKind::A : CorruptionKind::B;
        spec.seed = 2000 + static_cast<std::uint64_t>(trial);
        Dataset d = generate_synthetic(spec).data;
        std::size_t q;
        if (trial % 10 == 0) q = d.n();                 // degenerate minimax
        else if (trial % 10 == 1) q = 2;                // near-min rank
        else q = d.n() / 2 + 1 + rng.below(d.n() / 4 + 1);
        q = std::min(q, d.n());

        auto lad = fit_lad(d, *solver);
        OracleFit oracle = lqs_subset_oracle(d, q, {lad.beta});
        bool violation = false;
        BigMBounds b = bounds_for(d, *solver, &oracle.beta, &violation);
        if (violation) {
            ok = false;
            log << "seed " << spec.seed << ": oracle fit outside the eta=2 box";
            break;
        }
        // the assignment model is the weak formulation; its full-size runs
        // stay in the small strata so the pinned 30-minute budget holds
        const bool perm = d.n() <= 14;
        const bool perm_cut_modes = d.n() <= 9;
        for (const MethodRun& run : run_all_formulations(
                 d, q, b, *solver, params, perm, perm_cut_modes)) {
            ++checked;
            if (run.fit.status != SolveStatus::Optimal ||
                std::abs(run.fit.objective - oracle.objective) > 1e-6) {
                ok = false;
                log << "seed " << spec.seed << " n=" << d.n() << " p=" << p
                    << " q=" << q << " " << run.label << ": objective "
                    << run.fit.objective << " vs oracle " << oracle.objective
                    << " status " << static_cast<int>(run.fit.status);
                break;
            }
        }
    }
    const double elapsed = now_seconds() - t0;
    if (elapsed > 1800.0) {
        ok = false;
        log << "; runtime " << elapsed << "s exceeded the 30-minute budget";
    }
    std::ostringstream head;
    head << checked << " solver runs over 50 instances agreed with the subset "
         << "oracle within 1e-6 in " << static_cast<int>(elapsed) << "s";
    detail = ok ? head.str() : log.str();
    return ok ? Outcome::Pass : Outcome::Fail;
}

// ---------------------------------------------------------------- 3 ----
Outcome criterion3(const std::string&, std::string& detail) {
    auto solver = make_solver();
    SolveParams params;
    params.time_limit = 240.0;
    Rng rng(20240303);
    std::ostringstream log;
    bool ok = true;
    int solves = 0;
    const double t0 = now_seconds();
    for (int trial = 0; trial < 100 && ok; ++trial) {
        std::size_t n;
        if (trial % 20 == 19) n = 200;
        else if (trial % 20 == 18) n = 100 + rng.below(100);
        else if (trial % 20 == 17) n = 30 + rng.below(70);
        else n = 5 + rng.below(26);
        Dataset d;
        d.has_intercept = true;
        d.X.assign(n, {1.0});
        d.y.resize(n);
        const double mu = (rng.uniform() < 0.5 ? -1.0 : 1.0) *
                          (3.0 + 17.0 * rng.uniform());
        for (double& y : d.y) y = mu + rng.normal(0.0, 1.0);
        const std::size_t q =
            std::max<std::size_t>(2, static_cast<std::size_t>(
                                         std::ceil((0.3 + 0.68 * rng.uniform()) *
                                                   static_cast<double>(n))));
        LocationOptimum loc = lqs_location_oracle(d.y, q);
        bool violation = false;
        std::vector<double> loc_beta{loc.beta};
        BigMBounds b = bounds_for(d, *solver, &loc_beta, &violation);
        if (violation) {
            ok = false;
            log << "trial " << trial << ": oracle intercept outside the eta=2 box";
            break;
        }
        for (const MethodRun& run : run_all_formulations(
                 d, q, b, *solver, params, n <= 12, false)) {
            ++solves;
            if (run.fit.status != SolveStatus::Optimal) {
                ok = false;
                log << "trial " << trial << " n=" << n << " q=" << q << " "
                    << run.label << ": not solved to optimality";
                break;
            }
            if (std::abs(run.fit.objective - loc.objective) > 1e-6) {
                ok = false;
                log << "trial " << trial << " n=" << n << " q=" << q << " "
                    << run.label << ": decode " << run.fit.objective
                    << " vs oracle " << loc.objective;
                break;
            }
            PolishedFit polished = polish_fit(d, q, run.fit.beta);
            if (std::abs(polished.objective - loc.objective) > 1e-9) {
                ok = false;
                log << "trial " << trial << " n=" << n << " q=" << q << " "
                    << run.label << ": polished " << polished.objective
                    << " vs oracle " << loc.objective;
                break;
            }
        }
    }
    std::ostringstream head;
    head << solves << " intercept-only solves matched the window oracle to 1e-9 in "
         << static_cast<int>(now_seconds() - t0) << "s";
    detail = ok ? head.str() : log.str();
    return ok ? Outcome::Pass : Outcome::Fail;
}

// ---------------------------------------------------------------- 4 ----
Outcome criterion4(const std::string&, std::string& detail) {
    KsumQuantileReport r3 = ksum_quantile_identity({1, 2, 3, 4}, 0.5, 3);
    KsumQuantileReport r2 = ksum_quantile_identity({1, 2, 3, 4}, 0.5, 2);
    bool ok = r3.identity_holds && std::abs(r3.lhs - 7.0) < 1e-12 &&
              std::abs(r3.rhs - 7.0) < 1e-12 && std::abs(r3.correction) < 1e-12 &&
              r2.identity_holds && std::abs(r2.lhs - 7.0) < 1e-12 &&
              std::abs(r2.rhs - 9.0) < 1e-12 && std::abs(r2.correction + 2.0) < 1e-12;
    if (!ok) {
        detail = "printed hand case failed";
        return Outcome::Fail;
    }
    Rng rng(20240404);
    long checks = 0;
    for (int vec = 0; vec < 1000; ++vec) {
        const std::size_t n = 1 + rng.below(50);
        std::vector<double> x(n);
        for (double& v : x) v = std::abs(rng.normal(0, 10));
        const double tau = 0.01 + 0.98 * rng.uniform();
        for (std::size_t q = 1; q <= n; ++q) {
            KsumQuantileReport rep = ksum_quantile_identity(x, tau, q);
            ++checks;
            if (!rep.identity_holds || !rep.lower_bound_holds) {
                std::ostringstream bad;
                bad << "vector " << vec << " q=" << q << " tau=" << tau
                    << ": lhs=" << rep.lhs << " rhs=" << rep.rhs
                    << " correction=" << rep.correction;
                detail = bad.str();
                return Outcome::Fail;
            }
        }
    }
    std::ostringstream head;
    head << "identity held to 1e-12 relative on " << checks
         << " (vector, rank) pairs plus the printed hand case";
    detail = head.str();
    return Outcome::Pass;
}

// ---------------------------------------------------------------- 5 ----
Outcome criterion5(const std::string&, std::string& detail) {
    auto solver = make_solver();
    SolveParams params;
    params.time_limit = 120.0;
    SolveParams relax = params;
    relax.relax_integrality = true;
    Rng rng(20240505);
    std::ostringstream log;
    bool ok = true;
    double worst_delta = 0.0, worst_root_drop = 0.0;
    for (int trial = 0; trial < 50 && ok; ++trial) {
        SyntheticSpec spec;
        spec.n = 8 + rng.below(7);
        spec.p = 1 + rng.below(2);
        spec.pi = 0.2 + 0.2 * rng.uniform();
        spec.kind = rng.uniform() < 0.5 ? CorruptionKind::A : CorruptionKind::B;
        spec.seed = 5000 + static_cast<std::uint64_t>(trial);
        Dataset d = generate_synthetic(spec).data;
        const std::size_t q = d.n() / 2 + 1;
        BigMBounds b = derive_default_bounds(d, *solver, 1.5);

        FitResult without =
            solve_formulation(build_ksum(d, q, b, false), d, *solver, params);
        FitResult with =
            solve_formulation(build_ksum(d, q, b, true), d, *solver, params);
        if (without.status != SolveStatus::Optimal ||
            with.status != SolveStatus::Optimal) {
            ok = false;
            log << "seed " << spec.seed << ": tail-sum solve not optimal";
            break;
        }
        const double delta = std::abs(without.objective - with.objective);
        worst_delta = std::max(worst_delta, delta);
        if (delta >= 1e-7) {
            ok = false;
            log << "seed " << spec.seed << ": optimum moved by " << delta;
            break;
        }
        SolveResult root_without =
            solver->solve(lower_all(build_ksum(d, q, b, false).model), relax);
        SolveResult root_with =
            solver->solve(lower_all(build_ksum(d, q, b, true).model), relax);
        if (root_without.status != SolveStatus::Optimal ||
            root_with.status != SolveStatus::Optimal) {
            ok = false;
            log << "seed " << spec.seed << ": root relaxation failed";
            break;
        }
        worst_root_drop = std::max(
            worst_root_drop, root_without.objective - root_with.objective);
        if (root_with.objective < root_without.objective - 1e-9) {
            ok = false;
            log << "seed " << spec.seed << ": root bound dropped from "
                << root_without.objective << " to " << root_with.objective;
            break;
        }
    }
    std::ostringstream head;
    head << "50 instances: optimum shift < 1e-7 (worst " << worst_delta
         << "), root bound never weaker (worst drop " << worst_root_drop << ")";
    detail = ok ? head.str() : log.str();
    return ok ? Outcome::Pass : Outcome::Fail;
}

// ---------------------------------------------------------------- 6 ----
Outcome criterion6(const std::string&, std::string& detail) {
    auto solver = make_solver();
    std::ostringstream log;
    bool ok = true;
    int certified_exact = 0;
    for (int trial = 0; trial < 10 && ok; ++trial) {
        SyntheticSpec spec;
        spec.n = 500;
        spec.p = 3;
        spec.pi = 0.4;
        spec.kind = CorruptionKind::B;
        spec.seed = 6001 + static_cast<std::uint64_t>(trial);
        Dataset d = generate_synthetic(spec).data;
        const std::size_t q = 300;

        BigMBounds box = derive_default_bounds(d, *solver, 1.5);
        AggregateDataset agg = aggregate(d, 50, spec.seed);
        const double D = compute_D(d, agg, box);

        BigMBounds rep_bounds = derive_bigm_bounds(agg.reps, box.beta0, box.eta);
        SolveParams agg_params;
        agg_params.time_limit = 600.0;
        FitResult agg_fit =
            solve_formulation(build_weighted_formulation(agg, q, rep_bounds),
                              agg.reps, *solver, agg_params);
        if (!agg_fit.has_incumbent()) {
            ok = false;
            log << "seed " << spec.seed << ": aggregate solve failed";
            break;
        }
        const double fq_agg = qth_abs_residual(residuals(d, agg_fit.beta).s, q);

        // escalate the exact solve budget only while the bound check is
        // still unresolved; 3600 s is the hard cap per instance
        bool resolved = false;
        double fq_exact = 0.0, exact_bound = 0.0;
        for (double budget : {60.0, 300.0, 3600.0}) {
            SolveParams exact_params;
            exact_params.time_limit = budget;
            FitResult exact = solve_formulation(build_bilevel_indicator(d, q, box),
                                                d, *solver, exact_params);
            if (!exact.has_incumbent()) continue;
            fq_exact = exact.objective;
            exact_bound = std::max(exact.bound, 0.0);
            if (exact.status == SolveStatus::Optimal) {
                ++certified_exact;
                resolved = theorem2_check(fq_exact, fq_agg, D).pass;
                break;
            }
            // certified sufficient condition: the aggregate value is within
            // 2D of the proven lower bound, hence of the true optimum
            if (fq_agg - exact_bound <= 2.0 * D + 1e-6) {
                resolved = true;
                break;
            }
        }
        if (!resolved) {
            ok = false;
            log << "seed " << spec.seed << ": |" << fq_exact << " - " << fq_agg
                << "| vs 2D=" << 2.0 * D << " (LB " << exact_bound
                << ") unresolved";
        }
    }
    std::ostringstream head;
    head << "10 aggregated instances stayed within 2D of the exact optimum ("
         << certified_exact << " exact solves certified)";
    detail = ok ? head.str() : log.str();
    return ok ? Outcome::Pass : Outcome::Fail;
}

// ---------------------------------------------------------------- 7 ----
Outcome criterion7(const std::string&, std::string& detail) {
    Rng rng(20240707);
    for (int trial = 0; trial < 1000; ++trial) {
        SyntheticSpec spec;
        spec.n = 20 + rng.below(81);
        spec.p = 1 + rng.below(5);
        spec.pi = rng.uniform();
        spec.kind = trial % 2 == 0 ? CorruptionKind::A : CorruptionKind::B;
        spec.seed = static_cast<std::uint64_t>(7000 + trial);
        SyntheticInstance inst = generate_synthetic(spec);
        const std::size_t m = static_cast<std::size_t>(
            spec.pi * static_cast<double>(spec.n));
        std::ostringstream bad;
        if (spec.kind == CorruptionKind::A) {
            if (inst.corrupted_covariate.size() != m ||
                !inst.corrupted_response.empty()) {
                bad << "seed " << spec.seed << ": kind A corrupted "
                    << inst.corrupted_covariate.size() << " of expected " << m;
                detail = bad.str();
                return Outcome::Fail;
            }
        } else {
            if (inst.corrupted_covariate.size() != m / 2 ||
                inst.corrupted_response.size() != m - m / 2) {
                bad << "seed " << spec.seed << ": kind B split "
                    << inst.corrupted_covariate.size() << "/"
                    << inst.corrupted_response.size() << " of expected " << m / 2
                    << "/" << (m - m / 2);
                detail = bad.str();
                return Outcome::Fail;
            }
        }
        if (instance_to_string(inst) !=
            instance_to_string(generate_synthetic(spec))) {
            bad << "seed " << spec.seed << ": regeneration not byte-identical";
            detail = bad.str();
            return Outcome::Fail;
        }
    }
    detail = "corruption counts exact and regeneration byte-identical over "
             "1000 seeds";
    return Outcome::Pass;
}

// ---------------------------------------------------------------- 8 ----
Outcome criterion8(const std::string&, std::string& detail) {
    Rng rng(20240808);
    for (int trial = 0; trial < 200; ++trial) {
        MilpModel m = testsupport::make_random_tiny_model(rng);
        auto native = testsupport::enumerate_optimum(m);
        auto lowered = testsupport::enumerate_optimum(lower_all(m));
        if (native.feasible != lowered.feasible ||
            (native.feasible &&
             std::abs(native.objective - lowered.objective) >
                 1e-7 * (1.0 + std::abs(native.objective)))) {
            std::ostringstream bad;
            bad << "model " << trial << ": native "
                << (native.feasible ? std::to_string(native.objective)
                                    : std::string("infeasible"))
                << " vs lowered "
                << (lowered.feasible ? std::to_string(lowered.objective)
                                     : std::string("infeasible"));
            detail = bad.str();
            return Outcome::Fail;
        }
    }
    detail = "200 exhaustive enumerations matched across lowering";
    return Outcome::Pass;
}

// ---------------------------------------------------------------- 9 ----
Outcome criterion9(const std::string&, std::string& detail) {
    BenchGrid grid;
    grid.n = 50;
    grid.p = 5;
    grid.q_values = {15, 30};
    grid.pi = 0.4;
    grid.kinds = {CorruptionKind::A, CorruptionKind::B};
    grid.seed_base = 9001;
    grid.seed_count = 20;
    grid.formulations = {FormulationTag::Bm, FormulationTag::SlBigm,
                         FormulationTag::Bilevel};
    BenchOptions options;
    options.time_limit = 600.0;
    options.workers = bench_workers();
    options.solver = SolverConfig::defaults();
    BenchResults results = run_bench(grid, options);

    {
        std::ofstream raw("acceptance9_records.csv");
        raw << bench_records_csv(results);
        std::ofstream cells("acceptance9_cells.csv");
        cells << bench_cells_csv(results);
    }

    // cells where some method certified: the threshold and indicator
    // counting models must sit on the best incumbent (printed 0.00)
    std::map<std::tuple<std::size_t, int, std::uint64_t>, bool> any_certified;
    for (const BenchRecord& rec : results.records) {
        const auto key = std::make_tuple(
            rec.q, rec.kind == CorruptionKind::A ? 0 : 1, rec.seed);
        any_certified[key] = any_certified[key] || rec.certified;
    }
    bool ok = true;
    std::size_t checked_cells = 0, certified_cells = 0;
    std::ostringstream log;
    for (const BenchRecord& rec : results.records) {
        if (rec.formulation != FormulationTag::SlBigm &&
            rec.formulation != FormulationTag::Bilevel)
            continue;
        const auto key = std::make_tuple(
            rec.q, rec.kind == CorruptionKind::A ? 0 : 1, rec.seed);
        ++checked_cells;
        if (!any_certified[key]) continue;
        ++certified_cells;
        if (!rec.accuracy_valid || rec.accuracy > 0.005) {
            ok = false;
            log << formulation_name(rec.formulation) << " q=" << rec.q << " "
                << (rec.kind == CorruptionKind::A ? "A" : "B") << " seed "
                << rec.seed << ": accuracy "
                << (rec.accuracy_valid ? rec.accuracy : -1.0) << "; ";
        }
    }
    std::ostringstream head;
    head << "threshold/indicator models printed 0.00 accuracy on all "
         << certified_cells << " certified cells (of " << checked_cells
         << " method-cells; CSVs in acceptance9_*.csv)";
    detail = ok ? head.str() : log.str();
    return ok ? Outcome::Pass : Outcome::Fail;
}

const Criterion kCriteria[] = {
    {1, "reference dataset optima", criterion1},
    {2, "formulations agree with the subset oracle", criterion2},
    {3, "intercept-only equivalence with the window oracle", criterion3},
    {4, "quantile-loss/tail-sum identity", criterion4},
    {5, "tail-sum valid inequality", criterion5},
    {6, "aggregation error bound", criterion6},
    {7, "synthetic generator contract", criterion7},
    {8, "lowering equivalence by enumeration", criterion8},
    {9, "reduced-scale benchmark ranking", criterion9},
};

} // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    std::string data_dir = "data";
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            selected.push_back(std::atoi(argv[++i]));
        } else if (arg == "--data-dir" && i + 1 < argc) {
            data_dir = argv[++i];
        } else {
            std::cerr << "usage: acceptance [--criterion N]... [--data-dir PATH]\n";
            return 2;
        }
    }

    bool failed = false;
    for (const Criterion& c : kCriteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), c.id) == selected.end())
            continue;
        std::string note;
        Outcome outcome;
        try {
            outcome = c.run(data_dir, note);
        } catch (const std::exception& e) {
            outcome = Outcome::Fail;
            note = std::string("exception: ") + e.what();
        }
        const char* tag = outcome == Outcome::Pass ? "PASS"
                          : outcome == Outcome::Skip ? "SKIP"
                                                     : "FAIL";
        std::cout << "[" << tag << "] criterion " << c.id << ": " << c.title
                  << " - " << note << "\n";
        if (outcome == Outcome::Fail) failed = true;
    }
    return failed ? 1 : 0;
}
