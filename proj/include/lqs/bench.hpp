#pragma once

#include "lqs/datagen.hpp"
#include "lqs/formulations.hpp"
#include "lqs/solver.hpp"

#include <string>
#include <vector>

namespace lqs {

struct BenchGrid {
    std::size_t n = 50;
    std::size_t p = 5;
    std::vector<std::size_t> q_values;
    double pi = 0.4;
    std::vector<CorruptionKind> kinds;
    std::uint64_t seed_base = 1;
    std::size_t seed_count = 20;
    std::vector<FormulationTag> formulations;
};

struct BenchOptions {
    double time_limit = 600.0;
    double eta = 1.5;
    std::size_t workers = 1;
    SolverConfig solver;
    SigmaMode sigma_mode = SigmaMode::Variance;
};

/// One solve on one instance.
struct BenchRecord {
    std::size_t n = 0, p = 0, q = 0;
    double pi = 0.0;
    CorruptionKind kind = CorruptionKind::A;
    std::uint64_t seed = 0;
    FormulationTag formulation = FormulationTag::SlBigm;
    SolveStatus status = SolveStatus::Error;
    bool certified = false;  // proved optimal within the cap
    double objective = 0.0;  // recomputed upper bound
    double bound = 0.0;
    double time_total = 0.0;
    double time_to_best = 0.0;
    double accuracy = 0.0;   // relative to the best method on the instance
    bool accuracy_valid = false;
    std::string error;
};

/// Aggregated cell, paper-style: means over seeds with the accuracy
/// standard error.
struct BenchCell {
    std::size_t n = 0, p = 0, q = 0;
    double pi = 0.0;
    CorruptionKind kind = CorruptionKind::A;
    FormulationTag formulation = FormulationTag::SlBigm;
    std::size_t runs = 0;
    std::size_t certified = 0;
    double mean_time = 0.0;
    double mean_time_ub = 0.0;
    double mean_accuracy = 0.0;
    double stderr_accuracy = 0.0;
};

struct BenchResults {
    std::vector<BenchRecord> records;
    std::vector<BenchCell> cells;
};

BenchResults run_bench(const BenchGrid& grid, const BenchOptions& options);

/// CSV writers; timing columns are real measurements and therefore the
/// only part expected to differ between reruns.
std::string bench_records_csv(const BenchResults& r);
std::string bench_cells_csv(const BenchResults& r);
std::string bench_plot_data(const BenchResults& r); // formulation, metric, mean, stderr

} // namespace lqs
