#pragma once

#include "lqs/milp.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace lqs {

enum class SosPolicy { Native, BigM };

struct SolveParams {
    double time_limit = 7200.0;    // seconds
    double rel_gap_target = 0.0;   // fraction in [0,1)
    int threads = 1;
    long seed = 0;
    SosPolicy sos_policy = SosPolicy::BigM;
    bool relax_integrality = false; // solve the LP relaxation instead

    void validate() const;
};

enum class SolveStatus { Optimal, FeasibleTimeout, Infeasible, Error };

struct SolveResult {
    SolveStatus status = SolveStatus::Error;
    std::map<std::string, double> incumbent;
    double objective = 0.0;        // best upper bound (minimization)
    double bound = 0.0;            // best proven lower bound
    double time_total = 0.0;
    double time_to_best = 0.0;     // approximate when the backend cannot observe it
    std::string message;

    bool has_incumbent() const {
        return status == SolveStatus::Optimal || status == SolveStatus::FeasibleTimeout;
    }
};

/// "name value" lines; lines starting with '#' and other non-pair lines
/// (solver banners) are skipped; variables missing from the file are 0.
/// Throws on a malformed numeric token, naming the line.
std::map<std::string, double> parse_solution_file(const std::string& bytes);

struct SolverConfig {
    // Shell command with {model} and {solution} placeholders; optional
    // {time_limit} {rel_gap} {seed} {threads} {relax} are substituted too.
    std::string command;
    // When set, a persistent process is kept alive and fed
    // "SOLVE <model> <solution> <tl> <gap> <seed> <threads> <relax>" lines.
    std::string server_command;
    std::string workdir;        // temp location; defaults to TMPDIR
    bool keep_files = false;

    /// Resolution order: LQS_SOLVER_CMD, LQS_SOLVER_CONFIG (file), the
    /// built-in reference runner.
    static SolverConfig defaults();
    static SolverConfig from_file(const std::string& path);
};

class MilpSolver {
  public:
    virtual ~MilpSolver() = default;
    virtual SolveResult solve(const MilpModel& model, const SolveParams& params) = 0;
};

/// Reference backend: emits the model file, invokes the configured MILP
/// solver executable, parses its solution file.
class SubprocessSolver : public MilpSolver {
  public:
    explicit SubprocessSolver(SolverConfig config);
    ~SubprocessSolver() override;

    SubprocessSolver(const SubprocessSolver&) = delete;
    SubprocessSolver& operator=(const SubprocessSolver&) = delete;

    SolveResult solve(const MilpModel& model, const SolveParams& params) override;

  private:
    struct Server;
    SolveResult run_once(const std::string& model_path,
                         const std::string& solution_path,
                         const SolveParams& params);
    SolveResult run_server(const std::string& model_path,
                           const std::string& solution_path,
                           const SolveParams& params);

    SolverConfig config_;
    std::string dir_;
    std::size_t serial_ = 0;
    std::unique_ptr<Server> server_;
    std::mutex mutex_;
};

std::unique_ptr<MilpSolver> make_solver(const SolverConfig& config = SolverConfig::defaults());

} // namespace lqs
