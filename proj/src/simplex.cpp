#include "lqs/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lqs {

namespace {

constexpr double kEps = 1e-9;

// Tableau simplex over equality rows with nonnegative variables.
// Basis starts from the artificial columns appended last.
struct Tableau {
    std::size_t m = 0; // rows
    std::size_t n = 0; // structural + slack columns (artificials excluded)
    std::vector<std::vector<double>> a; // m x (n + m) after artificials
    std::vector<double> b;              // rhs, kept nonnegative
    std::vector<std::size_t> basis;     // column basic in each row

    void pivot(std::size_t row, std::size_t col) {
        const double piv = a[row][col];
        const std::size_t width = a[row].size();
        for (std::size_t j = 0; j < width; ++j) a[row][j] /= piv;
        b[row] /= piv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == row) continue;
            const double f = a[i][col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < width; ++j) a[i][j] -= f * a[row][j];
            b[i] -= f * b[row];
        }
        basis[row] = col;
    }

    // Minimizes cost over the current basis. Bland's rule.
    // Returns false when unbounded.
    bool run(const std::vector<double>& cost, double& value,
             std::size_t active_cols) {
        std::vector<double> red(active_cols);
        for (;;) {
            // reduced costs: c_j - c_B' B^-1 A_j
            std::vector<double> cb(m);
            for (std::size_t i = 0; i < m; ++i) cb[i] = cost[basis[i]];
            std::size_t enter = active_cols;
            for (std::size_t j = 0; j < active_cols; ++j) {
                double r = cost[j];
                for (std::size_t i = 0; i < m; ++i) r -= cb[i] * a[i][j];
                red[j] = r;
                if (r < -kEps && enter == active_cols) enter = j;
            }
            if (enter == active_cols) break; // optimal
            std::size_t leave = m;
            double best = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                if (a[i][enter] > kEps) {
                    const double ratio = b[i] / a[i][enter];
                    if (leave == m || ratio < best - kEps ||
                        (ratio < best + kEps && basis[i] < basis[leave])) {
                        leave = i;
                        best = ratio;
                    }
                }
            }
            if (leave == m) return false; // unbounded direction
            pivot(leave, enter);
        }
        value = 0.0;
        for (std::size_t i = 0; i < m; ++i) value += cost[basis[i]] * b[i];
        return true;
    }
};

} // namespace

LpResult solve_lp(const LpProblem& problem) {
    const std::size_t nv = problem.num_vars();
    if (problem.lower.size() != nv || problem.upper.size() != nv)
        throw std::invalid_argument("solve_lp: bounds size mismatch");

    // Rewrite every variable as a shifted nonnegative one (or a difference
    // of two for free variables); finite upper bounds become extra rows.
    struct Mapped {
        std::size_t col = 0;      // first nonnegative column
        bool split = false;       // free variable: x = x+ - x-
        double shift = 0.0;       // x = shift + x'
        bool negated = false;     // x = shift - x' (upper bound only)
    };
    std::vector<Mapped> map(nv);
    std::size_t cols = 0;
    for (std::size_t j = 0; j < nv; ++j) {
        const double lo = problem.lower[j], hi = problem.upper[j];
        if (lo > hi) return {LpStatus::Infeasible, {}, 0.0};
        Mapped mj;
        mj.col = cols;
        if (std::isfinite(lo)) {
            mj.shift = lo;
            cols += 1;
        } else if (std::isfinite(hi)) {
            mj.shift = hi;
            mj.negated = true;
            cols += 1;
        } else {
            mj.split = true;
            cols += 2;
        }
        map[j] = mj;
    }

    std::vector<std::vector<double>> rows;
    std::vector<RowSense> senses;
    std::vector<double> rhs;
    auto add_row = [&](const std::vector<double>& coeffs, RowSense s, double r) {
        std::vector<double> expanded(cols, 0.0);
        double offset = 0.0;
        for (std::size_t j = 0; j < nv; ++j) {
            const double c = coeffs[j];
            if (c == 0.0) continue;
            const Mapped& mj = map[j];
            offset += c * mj.shift;
            if (mj.split) {
                expanded[mj.col] += c;
                expanded[mj.col + 1] -= c;
            } else {
                expanded[mj.col] += mj.negated ? -c : c;
            }
        }
        rows.push_back(std::move(expanded));
        senses.push_back(s);
        rhs.push_back(r - offset);
    };

    for (const LpRow& row : problem.rows) {
        if (row.coeffs.size() != nv)
            throw std::invalid_argument("solve_lp: row width mismatch");
        add_row(row.coeffs, row.sense, row.rhs);
    }
    for (std::size_t j = 0; j < nv; ++j) {
        const double lo = problem.lower[j], hi = problem.upper[j];
        if (std::isfinite(lo) && std::isfinite(hi) && hi > lo) {
            std::vector<double> c(nv, 0.0);
            c[j] = 1.0;
            add_row(c, RowSense::LessEqual, hi);
        } else if (std::isfinite(lo) && std::isfinite(hi) && hi == lo) {
            std::vector<double> c(nv, 0.0);
            c[j] = 1.0;
            add_row(c, RowSense::Equal, hi);
        }
    }

    const std::size_t m = rows.size();
    // slack columns for inequality rows
    std::size_t slacks = 0;
    for (RowSense s : senses)
        if (s != RowSense::Equal) ++slacks;

    Tableau t;
    t.m = m;
    t.n = cols + slacks;
    t.a.assign(m, std::vector<double>(t.n + m, 0.0));
    t.b.assign(m, 0.0);
    t.basis.assign(m, 0);

    std::size_t slack_at = cols;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < cols; ++j) t.a[i][j] = rows[i][j];
        t.b[i] = rhs[i];
        if (senses[i] == RowSense::LessEqual)
            t.a[i][slack_at++] = 1.0;
        else if (senses[i] == RowSense::GreaterEqual)
            t.a[i][slack_at++] = -1.0;
        if (t.b[i] < 0.0) {
            for (std::size_t j = 0; j < t.n; ++j) t.a[i][j] = -t.a[i][j];
            t.b[i] = -t.b[i];
        }
        t.a[i][t.n + i] = 1.0; // artificial
        t.basis[i] = t.n + i;
    }

    // Phase 1: drive artificials to zero.
    std::vector<double> phase1(t.n + m, 0.0);
    for (std::size_t i = 0; i < m; ++i) phase1[t.n + i] = 1.0;
    double v1 = 0.0;
    if (!t.run(phase1, v1, t.n + m))
        return {LpStatus::Infeasible, {}, 0.0};
    if (v1 > 1e-7) return {LpStatus::Infeasible, {}, 0.0};
    // Pivot any artificial still basic onto a structural column if possible.
    for (std::size_t i = 0; i < m; ++i) {
        if (t.basis[i] >= t.n) {
            for (std::size_t j = 0; j < t.n; ++j) {
                if (std::abs(t.a[i][j]) > kEps) {
                    t.pivot(i, j);
                    break;
                }
            }
        }
    }

    // Phase 2 over structural + slack columns only.
    std::vector<double> cost(t.n + m, 0.0);
    for (std::size_t j = 0; j < nv; ++j) {
        const double c = problem.objective[j];
        if (c == 0.0) continue;
        const Mapped& mj = map[j];
        if (mj.split) {
            cost[mj.col] += c;
            cost[mj.col + 1] -= c;
        } else {
            cost[mj.col] += mj.negated ? -c : c;
        }
    }
    // Degenerate rows may still carry an artificial in the basis; freeze it
    // at zero by pricing it out of phase 2.
    for (std::size_t i = 0; i < m; ++i)
        if (t.basis[i] >= t.n && t.b[i] > 1e-7)
            return {LpStatus::Infeasible, {}, 0.0};

    double v2 = 0.0;
    if (!t.run(cost, v2, t.n))
        return {LpStatus::Unbounded, {}, 0.0};

    std::vector<double> xcols(t.n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (t.basis[i] < t.n) xcols[t.basis[i]] = t.b[i];

    LpResult res;
    res.status = LpStatus::Optimal;
    res.x.resize(nv);
    double obj = 0.0;
    for (std::size_t j = 0; j < nv; ++j) {
        const Mapped& mj = map[j];
        double v;
        if (mj.split)
            v = xcols[mj.col] - xcols[mj.col + 1];
        else
            v = mj.shift + (mj.negated ? -xcols[mj.col] : xcols[mj.col]);
        res.x[j] = v;
        obj += problem.objective[j] * v;
    }
    res.objective = obj;
    return res;
}

ChebyshevFit chebyshev_fit(const std::vector<std::vector<double>>& X,
                           const std::vector<double>& y) {
    ChebyshevFit fit;
    if (X.empty() || X.size() != y.size()) return fit;
    const std::size_t n = X.size();
    const std::size_t p = X[0].size();

    // Pure intercept: the midrange is the exact minimax fit.
    bool intercept_only = (p == 1);
    for (std::size_t i = 0; i < n && intercept_only; ++i)
        intercept_only = (X[i][0] == 1.0);
    if (intercept_only) {
        const auto [mn, mx] = std::minmax_element(y.begin(), y.end());
        fit.beta = {(*mn + *mx) / 2.0};
        fit.value = (*mx - *mn) / 2.0;
        fit.ok = true;
        return fit;
    }

    // Variables: beta (free), t >= 0; rows  -t <= y_i - x_i'beta <= t.
    LpProblem lp;
    lp.objective.assign(p + 1, 0.0);
    lp.objective[p] = 1.0;
    lp.lower.assign(p + 1, -LpProblem::inf);
    lp.upper.assign(p + 1, LpProblem::inf);
    lp.lower[p] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        LpRow up;   // x_i'beta + t >= y_i
        up.coeffs.assign(p + 1, 0.0);
        for (std::size_t j = 0; j < p; ++j) up.coeffs[j] = X[i][j];
        up.coeffs[p] = 1.0;
        up.sense = RowSense::GreaterEqual;
        up.rhs = y[i];
        lp.rows.push_back(std::move(up));

        LpRow dn;   // x_i'beta - t <= y_i
        dn.coeffs.assign(p + 1, 0.0);
        for (std::size_t j = 0; j < p; ++j) dn.coeffs[j] = X[i][j];
        dn.coeffs[p] = -1.0;
        dn.sense = RowSense::LessEqual;
        dn.rhs = y[i];
        lp.rows.push_back(std::move(dn));
    }
    LpResult res = solve_lp(lp);
    if (res.status != LpStatus::Optimal) return fit;
    fit.beta.assign(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(p));
    fit.value = res.x[p];
    fit.ok = true;
    return fit;
}

} // namespace lqs
