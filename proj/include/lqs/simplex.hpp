#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace lqs {

/// Dense two-phase primal simplex for the small LPs solved in-process
/// (minimax fits on observation subsets, incumbent polishing, and the
/// enumeration oracles in the test suite). Not meant for large models;
/// those go through the MILP backend.

enum class LpStatus { Optimal, Infeasible, Unbounded };

enum class RowSense { LessEqual, Equal, GreaterEqual };

struct LpRow {
    std::vector<double> coeffs; // dense, one per variable
    RowSense sense = RowSense::LessEqual;
    double rhs = 0.0;
};

struct LpProblem {
    std::vector<double> objective; // minimized
    std::vector<LpRow> rows;
    std::vector<double> lower; // -inf allowed
    std::vector<double> upper; // +inf allowed

    std::size_t num_vars() const { return objective.size(); }
    static constexpr double inf = std::numeric_limits<double>::infinity();
};

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;
    double objective = 0.0;
};

LpResult solve_lp(const LpProblem& problem);

/// Minimax (Chebyshev) regression fit on the given observation rows:
/// minimizes max_i |y_i - x_i'beta|. Returns beta (size p) and the
/// attained maximum via LP; closed form is used for the pure-intercept
/// case.
struct ChebyshevFit {
    std::vector<double> beta;
    double value = 0.0;
    bool ok = false;
};

ChebyshevFit chebyshev_fit(const std::vector<std::vector<double>>& X,
                           const std::vector<double>& y);

} // namespace lqs
