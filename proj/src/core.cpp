#include "lqs/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lqs {

void Dataset::validate() const {
    if (y.empty()) throw std::invalid_argument("dataset: n must be >= 1");
    if (X.size() != y.size())
        throw std::invalid_argument("dataset: X has " + std::to_string(X.size()) +
                                    " rows, y has " + std::to_string(y.size()));
    const std::size_t cols = p();
    if (cols == 0) throw std::invalid_argument("dataset: p must be >= 1");
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (X[i].size() != cols)
            throw std::invalid_argument("dataset: row " + std::to_string(i) +
                                        " has " + std::to_string(X[i].size()) +
                                        " entries, expected " + std::to_string(cols));
        for (double v : X[i])
            if (!std::isfinite(v))
                throw std::invalid_argument("dataset: non-finite entry in row " +
                                            std::to_string(i));
        if (has_intercept && X[i][0] != 1.0)
            throw std::invalid_argument("dataset: intercept column is not all ones");
    }
    for (double v : y)
        if (!std::isfinite(v))
            throw std::invalid_argument("dataset: non-finite response entry");
}

ResidualVector residuals(const Dataset& d, const std::vector<double>& beta) {
    if (beta.size() != d.p())
        throw std::invalid_argument("residuals: beta has " +
                                    std::to_string(beta.size()) +
                                    " entries, expected " + std::to_string(d.p()));
    for (double b : beta)
        if (!std::isfinite(b))
            throw std::invalid_argument("residuals: non-finite coefficient");
    ResidualVector rv;
    rv.r.resize(d.n());
    rv.s.resize(d.n());
    for (std::size_t i = 0; i < d.n(); ++i) {
        double fit = std::inner_product(d.X[i].begin(), d.X[i].end(), beta.begin(), 0.0);
        rv.r[i] = d.y[i] - fit;
        rv.s[i] = std::abs(rv.r[i]);
    }
    return rv;
}

namespace {

std::vector<double> sorted_copy(const std::vector<double>& x) {
    std::vector<double> s(x);
    std::stable_sort(s.begin(), s.end());
    return s;
}

void check_rank(std::size_t n, std::size_t q, const char* who) {
    if (q < 1 || q > n)
        throw std::invalid_argument(std::string(who) + ": rank " + std::to_string(q) +
                                    " out of range [1, " + std::to_string(n) + "]");
}

} // namespace

double qth_abs_residual(const std::vector<double>& s, std::size_t q) {
    check_rank(s.size(), q, "qth_abs_residual");
    return sorted_copy(s)[q - 1];
}

double k_sum(const std::vector<double>& x, std::size_t k) {
    check_rank(x.size(), k, "k_sum");
    std::vector<double> s = sorted_copy(x);
    return std::accumulate(s.begin() + static_cast<std::ptrdiff_t>(k - 1), s.end(), 0.0);
}

double quantile_loss(const std::vector<double>& x, double gamma, double tau) {
    if (!(tau > 0.0 && tau < 1.0))
        throw std::invalid_argument("quantile_loss: tau must lie in (0,1)");
    double below = 0.0, above = 0.0;
    for (double v : x) {
        if (v < gamma)
            below += v - gamma;
        else
            above += v - gamma;
    }
    return (tau - 1.0) * below + tau * above;
}

double ordered_weighted_objective(const LambdaVector& lam,
                                  const std::vector<double>& s) {
    if (lam.lambda.size() != s.size())
        throw std::invalid_argument("ordered_weighted_objective: length mismatch");
    std::vector<double> ord = sorted_copy(s);
    return std::inner_product(lam.lambda.begin(), lam.lambda.end(), ord.begin(), 0.0);
}

KsumQuantileReport ksum_quantile_identity(const std::vector<double>& x,
                                          double tau, std::size_t q) {
    check_rank(x.size(), q, "ksum_quantile_identity");
    for (double v : x)
        if (v < 0.0)
            throw std::invalid_argument("ksum_quantile_identity: negative entry");
    const double n = static_cast<double>(x.size());
    const double total = std::accumulate(x.begin(), x.end(), 0.0);
    const double gamma = qth_abs_residual(x, q);

    KsumQuantileReport rep;
    rep.lhs = quantile_loss(x, gamma, tau) + (1.0 - tau) * total;
    rep.rhs = k_sum(x, q);
    rep.correction = gamma * (static_cast<double>(q) - 1.0 - tau * n);

    const double resid = rep.lhs - (rep.rhs + rep.correction);
    const double scale = 1.0 + std::abs(rep.lhs);
    rep.identity_holds = std::abs(resid) <= 1e-12 * scale + 1e-9;
    if (static_cast<double>(q) >= tau * n + 1.0)
        rep.lower_bound_holds = rep.lhs >= rep.rhs - 1e-9 * scale;
    return rep;
}

LambdaVector lambda_lad(std::size_t n) {
    return LambdaVector{std::vector<double>(n, 1.0)};
}

LambdaVector lambda_chebyshev(std::size_t n) {
    LambdaVector l{std::vector<double>(n, 0.0)};
    l.lambda[n - 1] = 1.0;
    return l;
}

LambdaVector lambda_kmax(std::size_t n, std::size_t q) {
    check_rank(n, q, "lambda_kmax");
    LambdaVector l{std::vector<double>(n, 0.0)};
    l.lambda[q - 1] = 1.0;
    return l;
}

LambdaVector lambda_gini(std::size_t n) {
    LambdaVector l{std::vector<double>(n, 0.0)};
    for (std::size_t i = 1; i <= n; ++i)
        l.lambda[i - 1] = 2.0 * (2.0 * static_cast<double>(i) -
                                 static_cast<double>(n) - 1.0);
    return l;
}

} // namespace lqs
