#include "lqs/bench.hpp"

#include "lqs/oracle.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace lqs {

namespace {

FormulationArtifact build_by_tag(FormulationTag tag, const Dataset& d, std::size_t q,
                                 const BigMBounds& b) {
    switch (tag) {
        case FormulationTag::Bm: return build_bm(d, q, b);
        case FormulationTag::SlPerm:
            return build_sl_perm(d, q, SortingCutMode::CoefficientSort, b);
        case FormulationTag::SlCount: return build_sl_count(d, q, b);
        case FormulationTag::SlBigm: return build_sl_bigm(d, q, b);
        case FormulationTag::Ksum: return build_ksum(d, q, b, true);
        case FormulationTag::Bilevel: return build_bilevel_indicator(d, q, b);
        default:
            throw std::invalid_argument("bench: unsupported formulation tag");
    }
}

struct Unit {
    std::size_t q = 0;
    CorruptionKind kind = CorruptionKind::A;
    std::uint64_t seed = 0;
    FormulationTag formulation = FormulationTag::SlBigm;
    std::size_t slot = 0;
};

std::string kind_name(CorruptionKind k) { return k == CorruptionKind::A ? "A" : "B"; }

std::string status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::FeasibleTimeout: return "feasible-timeout";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Error: return "error";
    }
    return "?";
}

} // namespace

BenchResults run_bench(const BenchGrid& grid, const BenchOptions& options) {
    std::vector<Unit> units;
    for (CorruptionKind kind : grid.kinds)
        for (std::size_t q : grid.q_values)
            for (std::size_t s = 0; s < grid.seed_count; ++s)
                for (FormulationTag tag : grid.formulations) {
                    Unit u;
                    u.q = q;
                    u.kind = kind;
                    u.seed = grid.seed_base + s;
                    u.formulation = tag;
                    u.slot = units.size();
                    units.push_back(u);
                }

    BenchResults results;
    results.records.resize(units.size());

    // Bounds are shared across the formulations of one instance; cache the
    // generated data and reference fit per (kind, seed).
    struct InstanceData {
        Dataset data;
        BigMBounds bounds;
    };
    std::map<std::pair<int, std::uint64_t>, InstanceData> cache;
    std::mutex cache_mutex;

    std::atomic<std::size_t> next{0};
    const std::size_t workers = std::max<std::size_t>(1, options.workers);

    auto work = [&]() {
        auto solver = make_solver(options.solver);
        for (;;) {
            const std::size_t at = next.fetch_add(1);
            if (at >= units.size()) break;
            const Unit& u = units[at];
            BenchRecord rec;
            rec.n = grid.n;
            rec.p = grid.p;
            rec.q = u.q;
            rec.pi = grid.pi;
            rec.kind = u.kind;
            rec.seed = u.seed;
            rec.formulation = u.formulation;
            try {
                InstanceData inst;
                {
                    const std::pair<int, std::uint64_t> key{
                        u.kind == CorruptionKind::A ? 0 : 1, u.seed};
                    std::unique_lock<std::mutex> lock(cache_mutex);
                    auto it = cache.find(key);
                    if (it == cache.end()) {
                        lock.unlock();
                        SyntheticSpec spec;
                        spec.n = grid.n;
                        spec.p = grid.p;
                        spec.pi = grid.pi;
                        spec.kind = u.kind;
                        spec.seed = u.seed;
                        spec.sigma_mode = options.sigma_mode;
                        InstanceData fresh;
                        fresh.data = generate_synthetic(spec).data;
                        fresh.bounds =
                            derive_default_bounds(fresh.data, *solver, options.eta);
                        lock.lock();
                        it = cache.emplace(key, std::move(fresh)).first;
                    }
                    inst = it->second;
                }
                FormulationArtifact art =
                    build_by_tag(u.formulation, inst.data, u.q, inst.bounds);
                SolveParams params;
                params.time_limit = options.time_limit;
                params.seed = static_cast<long>(u.seed);
                FitResult fit = solve_formulation(art, inst.data, *solver, params);
                rec.status = fit.status;
                rec.certified = fit.status == SolveStatus::Optimal;
                if (fit.status == SolveStatus::Optimal ||
                    fit.status == SolveStatus::FeasibleTimeout) {
                    rec.objective = fit.objective;
                    rec.bound = fit.bound;
                } else {
                    rec.error = fit.message;
                }
                rec.time_total = fit.time_total;
                rec.time_to_best = fit.time_to_best;
            } catch (const std::exception& e) {
                rec.status = SolveStatus::Error;
                rec.error = e.what();
            }
            results.records[u.slot] = rec;
        }
    };

    std::vector<std::thread> pool;
    for (std::size_t w = 0; w + 1 < workers; ++w) pool.emplace_back(work);
    work();
    for (std::thread& t : pool) t.join();

    // best objective per instance across methods, then relative accuracy
    std::map<std::tuple<std::size_t, int, std::uint64_t>, double> best;
    for (const BenchRecord& rec : results.records) {
        if (rec.status != SolveStatus::Optimal &&
            rec.status != SolveStatus::FeasibleTimeout)
            continue;
        const auto key = std::make_tuple(rec.q, rec.kind == CorruptionKind::A ? 0 : 1,
                                         rec.seed);
        auto it = best.find(key);
        if (it == best.end() || rec.objective < it->second) best[key] = rec.objective;
    }
    for (BenchRecord& rec : results.records) {
        if (rec.status != SolveStatus::Optimal &&
            rec.status != SolveStatus::FeasibleTimeout)
            continue;
        const auto key = std::make_tuple(rec.q, rec.kind == CorruptionKind::A ? 0 : 1,
                                         rec.seed);
        const double fstar = best[key];
        if (fstar > 0.0) {
            rec.accuracy = relative_accuracy(rec.objective, fstar);
            rec.accuracy_valid = true;
        }
    }

    // aggregate per (q, kind, formulation)
    std::map<std::tuple<std::size_t, int, int>, std::vector<const BenchRecord*>> cells;
    for (const BenchRecord& rec : results.records)
        cells[std::make_tuple(rec.q, rec.kind == CorruptionKind::A ? 0 : 1,
                              static_cast<int>(rec.formulation))]
            .push_back(&rec);
    for (const auto& [key, recs] : cells) {
        BenchCell cell;
        cell.n = grid.n;
        cell.p = grid.p;
        cell.q = std::get<0>(key);
        cell.pi = grid.pi;
        cell.kind = std::get<1>(key) == 0 ? CorruptionKind::A : CorruptionKind::B;
        cell.formulation = static_cast<FormulationTag>(std::get<2>(key));
        std::vector<double> accs;
        for (const BenchRecord* r : recs) {
            ++cell.runs;
            if (r->certified) ++cell.certified;
            cell.mean_time += r->time_total;
            cell.mean_time_ub += r->time_to_best;
            if (r->accuracy_valid) accs.push_back(r->accuracy);
        }
        cell.mean_time /= static_cast<double>(cell.runs);
        cell.mean_time_ub /= static_cast<double>(cell.runs);
        if (!accs.empty()) {
            double mean = 0.0;
            for (double a : accs) mean += a;
            mean /= static_cast<double>(accs.size());
            double var = 0.0;
            for (double a : accs) var += (a - mean) * (a - mean);
            cell.mean_accuracy = mean;
            if (accs.size() > 1)
                cell.stderr_accuracy = std::sqrt(
                    var / static_cast<double>(accs.size() - 1) /
                    static_cast<double>(accs.size()));
        }
        results.cells.push_back(cell);
    }
    return results;
}

std::string bench_records_csv(const BenchResults& r) {
    std::ostringstream out;
    out << "n,p,q,pi,type,seed,formulation,status,certified,objective,bound,"
           "accuracy,time,time_ub,error\n";
    char buf[64];
    for (const BenchRecord& rec : r.records) {
        out << rec.n << ',' << rec.p << ',' << rec.q << ',' << rec.pi << ','
            << kind_name(rec.kind) << ',' << rec.seed << ','
            << formulation_name(rec.formulation) << ',' << status_name(rec.status)
            << ',' << (rec.certified ? 1 : 0) << ',';
        std::snprintf(buf, sizeof(buf), "%.9g", rec.objective);
        out << buf << ',';
        std::snprintf(buf, sizeof(buf), "%.9g", rec.bound);
        out << buf << ',';
        if (rec.accuracy_valid) {
            std::snprintf(buf, sizeof(buf), "%.4f", rec.accuracy);
            out << buf;
        }
        out << ',';
        std::snprintf(buf, sizeof(buf), "%.3f", rec.time_total);
        out << buf << ',';
        std::snprintf(buf, sizeof(buf), "%.3f", rec.time_to_best);
        out << buf << ',' << rec.error << "\n";
    }
    return out.str();
}

std::string bench_cells_csv(const BenchResults& r) {
    std::ostringstream out;
    out << "n,p,q,pi,type,formulation,runs,certified,time,accuracy,time_ub\n";
    char buf[96];
    for (const BenchCell& c : r.cells) {
        out << c.n << ',' << c.p << ',' << c.q << ',' << c.pi << ','
            << kind_name(c.kind) << ',' << formulation_name(c.formulation) << ','
            << c.runs << ',' << c.certified << ',';
        std::snprintf(buf, sizeof(buf), "%.2f", c.mean_time);
        out << buf << ',';
        std::snprintf(buf, sizeof(buf), "%.2f (%.2f)", c.mean_accuracy,
                      c.stderr_accuracy);
        out << '"' << buf << '"' << ',';
        std::snprintf(buf, sizeof(buf), "%.2f", c.mean_time_ub);
        out << buf << "\n";
    }
    return out.str();
}

std::string bench_plot_data(const BenchResults& r) {
    std::ostringstream out;
    out << "n,p,q,pi,type,formulation,metric,mean,stderr\n";
    char buf[64];
    for (const BenchCell& c : r.cells) {
        auto row = [&](const char* metric, double mean, double se) {
            out << c.n << ',' << c.p << ',' << c.q << ',' << c.pi << ','
                << kind_name(c.kind) << ',' << formulation_name(c.formulation) << ','
                << metric << ',';
            std::snprintf(buf, sizeof(buf), "%.6g", mean);
            out << buf << ',';
            std::snprintf(buf, sizeof(buf), "%.6g", se);
            out << buf << "\n";
        };
        row("time", c.mean_time, 0.0);
        row("time_ub", c.mean_time_ub, 0.0);
        row("accuracy", c.mean_accuracy, c.stderr_accuracy);
    }
    return out.str();
}

} // namespace lqs
