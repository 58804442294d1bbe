#include "lqs/solver.hpp"

#include "lqs/mps.hpp"

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace lqs {

void SolveParams::validate() const {
    if (!(time_limit > 0.0))
        throw std::invalid_argument("solve params: time limit must be positive");
    if (!(rel_gap_target >= 0.0 && rel_gap_target < 1.0))
        throw std::invalid_argument("solve params: relative gap target must lie in [0,1)");
    if (threads < 1) throw std::invalid_argument("solve params: threads must be >= 1");
}

std::map<std::string, double> parse_solution_file(const std::string& bytes) {
    std::map<std::string, double> values;
    std::istringstream in(bytes);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string name, value, extra;
        if (!(ls >> name >> value)) continue;       // blank-ish
        if (ls >> extra) continue;                  // banner line, skip
        try {
            std::size_t used = 0;
            double v = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
            values[name] = v;
        } catch (const std::exception&) {
            throw std::runtime_error("solution file: bad numeric token '" + value +
                                     "' at line " + std::to_string(lineno));
        }
    }
    return values;
}

namespace {

std::string getenv_str(const char* key) {
    const char* v = std::getenv(key);
    return v ? std::string(v) : std::string();
}

std::string substitute(std::string templ,
                       const std::map<std::string, std::string>& repl) {
    for (const auto& [key, value] : repl) {
        const std::string tag = "{" + key + "}";
        std::size_t pos;
        while ((pos = templ.find(tag)) != std::string::npos)
            templ.replace(pos, tag.size(), value);
    }
    return templ;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    std::size_t b = s.find_last_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

std::string strip_quotes(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
        return s.substr(1, s.size() - 2);
    return s;
}

// Comment metadata emitted by the runner alongside the variable values.
struct SolutionMeta {
    std::string status;
    double objective = 0.0;
    double bound = 0.0;
    double time_total = 0.0;
    double time_to_best = 0.0;
    std::string message;
    bool have_objective = false;
};

SolutionMeta parse_meta(const std::string& bytes) {
    SolutionMeta meta;
    std::istringstream in(bytes);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] != '#') continue;
        std::istringstream ls(line.substr(1));
        std::string key;
        if (!(ls >> key)) continue;
        std::string rest;
        std::getline(ls, rest);
        rest = trim(rest);
        if (key == "status") meta.status = rest;
        else if (key == "objective") { meta.objective = std::stod(rest); meta.have_objective = true; }
        else if (key == "bound") meta.bound = std::stod(rest);
        else if (key == "time_total") meta.time_total = std::stod(rest);
        else if (key == "time_to_best") meta.time_to_best = std::stod(rest);
        else if (key == "message") meta.message = rest;
    }
    return meta;
}

} // namespace

SolverConfig SolverConfig::defaults() {
    SolverConfig cfg;
    const std::string cmd = getenv_str("LQS_SOLVER_CMD");
    if (!cmd.empty()) {
        cfg.command = cmd;
    } else {
        const std::string file = getenv_str("LQS_SOLVER_CONFIG");
        if (!file.empty()) return from_file(file);
#ifdef LQS_DEFAULT_RUNNER
        cfg.command = "python3 " LQS_DEFAULT_RUNNER
                      " solve {model} {solution} --time-limit {time_limit}"
                      " --rel-gap {rel_gap} --seed {seed} --threads {threads} {relax}";
        cfg.server_command = "python3 " LQS_DEFAULT_RUNNER " serve";
#endif
    }
    cfg.keep_files = getenv_str("LQS_KEEP_SOLVER_FILES") == "1";
    return cfg;
}

SolverConfig SolverConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("solver config: cannot open " + path);
    SolverConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = trim(line.substr(0, eq));
        const std::string value = strip_quotes(trim(line.substr(eq + 1)));
        if (key == "command") cfg.command = value;
        else if (key == "server_command") cfg.server_command = value;
        else if (key == "workdir") cfg.workdir = value;
        else if (key == "keep_files") cfg.keep_files = (value == "true" || value == "1");
    }
    if (cfg.command.empty() && cfg.server_command.empty())
        throw std::runtime_error("solver config: no command in " + path);
    return cfg;
}

// Persistent runner process with line-oriented stdin/stdout.
struct SubprocessSolver::Server {
    pid_t pid = -1;
    FILE* to_child = nullptr;
    FILE* from_child = nullptr;

    explicit Server(const std::string& command) {
        int in_pipe[2], out_pipe[2];
        if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
            throw std::runtime_error("solver server: pipe failed");
        pid = fork();
        if (pid < 0) throw std::runtime_error("solver server: fork failed");
        if (pid == 0) {
            dup2(in_pipe[0], STDIN_FILENO);
            dup2(out_pipe[1], STDOUT_FILENO);
            close(in_pipe[0]); close(in_pipe[1]);
            close(out_pipe[0]); close(out_pipe[1]);
            execl("/bin/sh", "sh", "-c", command.c_str(), (char*)nullptr);
            _exit(127);
        }
        close(in_pipe[0]);
        close(out_pipe[1]);
        to_child = fdopen(in_pipe[1], "w");
        from_child = fdopen(out_pipe[0], "r");
        if (!to_child || !from_child)
            throw std::runtime_error("solver server: fdopen failed");
    }

    ~Server() {
        if (to_child) fclose(to_child);
        if (from_child) fclose(from_child);
        if (pid > 0) {
            int status = 0;
            waitpid(pid, &status, 0);
        }
    }

    std::string request(const std::string& line) {
        if (fprintf(to_child, "%s\n", line.c_str()) < 0 || fflush(to_child) != 0)
            throw std::runtime_error("solver server: write failed");
        char buf[4096];
        if (!fgets(buf, sizeof(buf), from_child))
            throw std::runtime_error("solver server: runner exited unexpectedly");
        std::string reply(buf);
        while (!reply.empty() && (reply.back() == '\n' || reply.back() == '\r'))
            reply.pop_back();
        return reply;
    }
};

SubprocessSolver::SubprocessSolver(SolverConfig config) : config_(std::move(config)) {
    if (config_.command.empty() && config_.server_command.empty())
        throw std::runtime_error("solver: no command configured");
    std::string base = config_.workdir;
    if (base.empty()) {
        const std::string tmp = getenv_str("TMPDIR");
        base = tmp.empty() ? "/tmp" : tmp;
    }
    std::string templ = base + "/lqs_solver_XXXXXX";
    std::vector<char> buf(templ.begin(), templ.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data()))
        throw std::runtime_error("solver: cannot create temp dir under " + base);
    dir_ = buf.data();
}

SubprocessSolver::~SubprocessSolver() {
    server_.reset();
    if (!config_.keep_files) {
        std::error_code ec;
        fs::remove_all(dir_, ec);
    }
}

namespace {

SolveResult assemble_result(const std::string& solution_path, double wall_seconds) {
    SolveResult res;
    if (!fs::exists(solution_path)) {
        res.status = SolveStatus::Error;
        res.message = "no solution file produced";
        res.time_total = wall_seconds;
        return res;
    }
    const std::string bytes = read_file(solution_path);
    const SolutionMeta meta = parse_meta(bytes);
    if (meta.status == "optimal") res.status = SolveStatus::Optimal;
    else if (meta.status == "feasible-timeout") res.status = SolveStatus::FeasibleTimeout;
    else if (meta.status == "infeasible") res.status = SolveStatus::Infeasible;
    else res.status = SolveStatus::Error;
    res.message = meta.message;
    res.objective = meta.objective;
    res.bound = meta.bound;
    res.time_total = meta.time_total > 0.0 ? meta.time_total : wall_seconds;
    res.time_to_best = meta.time_to_best > 0.0 ? meta.time_to_best : res.time_total;
    if (res.has_incumbent()) res.incumbent = parse_solution_file(bytes);
    return res;
}

} // namespace

SolveResult SubprocessSolver::run_once(const std::string& model_path,
                                       const std::string& solution_path,
                                       const SolveParams& params) {
    const std::string log_path = solution_path + ".log";
    std::map<std::string, std::string> repl = {
        {"model", model_path},
        {"solution", solution_path},
        {"time_limit", std::to_string(params.time_limit)},
        {"rel_gap", std::to_string(params.rel_gap_target)},
        {"seed", std::to_string(params.seed)},
        {"threads", std::to_string(params.threads)},
        {"relax", params.relax_integrality ? "--relax" : ""},
    };
    const std::string cmd = substitute(config_.command, repl) + " >" + log_path + " 2>&1";
    const auto t0 = std::chrono::steady_clock::now();
    const int rc = std::system(cmd.c_str());
    const double wall = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();
    SolveResult res = assemble_result(solution_path, wall);
    if (res.status == SolveStatus::Error && res.message.empty()) {
        std::string log;
        if (fs::exists(log_path)) log = read_file(log_path);
        if (log.size() > 600) log = "..." + log.substr(log.size() - 600);
        res.message = "solver command failed (rc=" + std::to_string(rc) + "): " + log;
    }
    return res;
}

SolveResult SubprocessSolver::run_server(const std::string& model_path,
                                         const std::string& solution_path,
                                         const SolveParams& params) {
    if (!server_) server_ = std::make_unique<Server>(config_.server_command);
    std::ostringstream req;
    req << "SOLVE " << model_path << ' ' << solution_path << ' '
        << params.time_limit << ' ' << params.rel_gap_target << ' '
        << params.seed << ' ' << params.threads << ' '
        << (params.relax_integrality ? 1 : 0);
    const auto t0 = std::chrono::steady_clock::now();
    std::string reply;
    try {
        reply = server_->request(req.str());
    } catch (const std::exception& e) {
        server_.reset();
        SolveResult res;
        res.status = SolveStatus::Error;
        res.message = e.what();
        return res;
    }
    const double wall = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();
    if (reply.rfind("ERR", 0) == 0) {
        SolveResult res;
        res.status = SolveStatus::Error;
        res.message = reply.size() > 4 ? reply.substr(4) : "runner error";
        res.time_total = wall;
        return res;
    }
    return assemble_result(solution_path, wall);
}

SolveResult SubprocessSolver::solve(const MilpModel& model, const SolveParams& params) {
    params.validate();
    std::unique_lock<std::mutex> lock(mutex_);
    const std::size_t id = serial_++;
    const std::string model_path = dir_ + "/model_" + std::to_string(id) + ".mps";
    const std::string solution_path = dir_ + "/model_" + std::to_string(id) + ".sol";

    MpsWriteOptions opts;
    opts.allow_sos = false; // the reference runner takes plain MILP only
    std::string bytes;
    try {
        bytes = emit_model_file(model, opts);
    } catch (const std::exception& e) {
        SolveResult res;
        res.status = SolveStatus::Error;
        res.message = e.what();
        return res;
    }
    {
        std::ofstream out(model_path, std::ios::binary);
        out << bytes;
        if (!out) {
            SolveResult res;
            res.status = SolveStatus::Error;
            res.message = "cannot write " + model_path;
            return res;
        }
    }
    SolveResult res = !config_.server_command.empty()
                          ? run_server(model_path, solution_path, params)
                          : run_once(model_path, solution_path, params);
    if (!config_.keep_files) {
        std::error_code ec;
        fs::remove(model_path, ec);
        fs::remove(solution_path, ec);
        fs::remove(solution_path + ".log", ec);
    }
    return res;
}

std::unique_ptr<MilpSolver> make_solver(const SolverConfig& config) {
    return std::make_unique<SubprocessSolver>(config);
}

} // namespace lqs
