#pragma once

#include "lqs/core.hpp"
#include "lqs/solver.hpp"

#include <string>
#include <vector>

namespace lqs {

struct BaselineFit {
    std::vector<double> beta;
    double objective = 0.0; // value of the method's own loss at beta
    std::string method;
};

/// Ordinary least squares via a rank-revealing decomposition;
/// minimum-norm solution on rank deficiency. Objective is the residual
/// sum of squares.
BaselineFit fit_ls(const Dataset& d);

/// Least absolute deviation, solved as an LP over split residuals.
/// Objective is the l1 residual norm.
BaselineFit fit_lad(const Dataset& d, MilpSolver& solver);

/// tau-quantile regression LP; objective is the asymmetric residual loss.
BaselineFit fit_quantile(const Dataset& d, double tau, MilpSolver& solver);

} // namespace lqs
