#include "lqs/baselines.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace lqs {

namespace {

Eigen::MatrixXd to_eigen(const Dataset& d) {
    Eigen::MatrixXd X(d.n(), d.p());
    for (std::size_t i = 0; i < d.n(); ++i)
        for (std::size_t j = 0; j < d.p(); ++j) X(i, j) = d.X[i][j];
    return X;
}

// Shared LP skeleton: u_i - v_i + x_i'beta = y_i with u, v >= 0 and a
// weighted objective on the split.
BaselineFit solve_split_lp(const Dataset& d, double pos_weight, double neg_weight,
                           const std::string& method, MilpSolver& solver) {
    d.validate();
    const std::size_t n = d.n(), p = d.p();
    MilpModel m;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<VarId> beta(p), u(n), v(n);
    for (std::size_t j = 0; j < p; ++j)
        beta[j] = m.add_continuous("beta" + std::to_string(j), -inf, inf);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = m.add_continuous("u" + std::to_string(i), 0.0, inf);
        v[i] = m.add_continuous("v" + std::to_string(i), 0.0, inf);
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<LinTerm> terms{{u[i], 1.0}, {v[i], -1.0}};
        for (std::size_t j = 0; j < p; ++j)
            if (d.X[i][j] != 0.0) terms.push_back({beta[j], d.X[i][j]});
        m.add_eq("fit" + std::to_string(i), std::move(terms), d.y[i]);
    }
    std::vector<LinTerm> obj;
    for (std::size_t i = 0; i < n; ++i) {
        obj.push_back({u[i], pos_weight});
        obj.push_back({v[i], neg_weight});
    }
    m.set_objective(std::move(obj));

    SolveParams params;
    params.time_limit = 600.0;
    SolveResult res = solver.solve(m, params);
    if (!res.has_incumbent())
        throw std::runtime_error(method + " LP failed: " + res.message);

    BaselineFit fit;
    fit.method = method;
    fit.beta.resize(p);
    for (std::size_t j = 0; j < p; ++j)
        fit.beta[j] = res.incumbent.at("beta" + std::to_string(j));
    // Recompute the loss from beta; LP vertex values carry solver noise.
    ResidualVector rv = residuals(d, fit.beta);
    double loss = 0.0;
    for (double r : rv.r) loss += r >= 0.0 ? pos_weight * r : -neg_weight * r;
    fit.objective = loss;
    return fit;
}

} // namespace

BaselineFit fit_ls(const Dataset& d) {
    d.validate();
    Eigen::MatrixXd X = to_eigen(d);
    Eigen::VectorXd y(d.n());
    for (std::size_t i = 0; i < d.n(); ++i) y(i) = d.y[i];
    Eigen::VectorXd b = X.completeOrthogonalDecomposition().solve(y);
    BaselineFit fit;
    fit.method = "LS";
    fit.beta.assign(b.data(), b.data() + b.size());
    fit.objective = (y - X * b).squaredNorm();
    return fit;
}

BaselineFit fit_lad(const Dataset& d, MilpSolver& solver) {
    return solve_split_lp(d, 1.0, 1.0, "LAD", solver);
}

BaselineFit fit_quantile(const Dataset& d, double tau, MilpSolver& solver) {
    if (!(tau > 0.0 && tau < 1.0))
        throw std::invalid_argument("fit_quantile: tau must lie in (0,1)");
    BaselineFit fit = solve_split_lp(d, tau, 1.0 - tau, "QR", solver);
    fit.method = "QR(" + std::to_string(tau) + ")";
    return fit;
}

} // namespace lqs
