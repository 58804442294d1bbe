#include "lqs/simplex.hpp"

#include "lqs/datagen.hpp"

#include <doctest.h>

#include <cmath>

using namespace lqs;

namespace {

LpProblem make_lp(std::size_t nv) {
    LpProblem lp;
    lp.objective.assign(nv, 0.0);
    lp.lower.assign(nv, 0.0);
    lp.upper.assign(nv, LpProblem::inf);
    return lp;
}

} // namespace

TEST_CASE("simplex: single bounded variable") {
    LpProblem lp = make_lp(1);
    lp.objective = {1.0};
    lp.rows.push_back({{1.0}, RowSense::GreaterEqual, 3.0});
    LpResult res = solve_lp(lp);
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(res.objective == doctest::Approx(3.0));
}

TEST_CASE("simplex: knapsack-style maximization via negation") {
    LpProblem lp = make_lp(2);
    lp.objective = {-1.0, -1.0};
    lp.rows.push_back({{1.0, 1.0}, RowSense::LessEqual, 1.0});
    LpResult res = solve_lp(lp);
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(res.objective == doctest::Approx(-1.0));
}

TEST_CASE("simplex: infeasible and unbounded detection") {
    LpProblem bad = make_lp(1);
    bad.rows.push_back({{1.0}, RowSense::LessEqual, 0.0});
    bad.rows.push_back({{1.0}, RowSense::GreaterEqual, 1.0});
    CHECK(solve_lp(bad).status == LpStatus::Infeasible);

    LpProblem unb = make_lp(1);
    unb.objective = {-1.0};
    CHECK(solve_lp(unb).status == LpStatus::Unbounded);
}

TEST_CASE("simplex: negative and free-variable handling") {
    LpProblem lp = make_lp(1);
    lp.objective = {1.0};
    lp.lower = {-5.0};
    lp.upper = {-2.0};
    LpResult res = solve_lp(lp);
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(res.x[0] == doctest::Approx(-5.0));

    LpProblem free_var = make_lp(2);
    free_var.objective = {1.0, 1.0};      // min u + v
    free_var.lower = {0.0, 0.0};
    // u - v = -7 forces v >= 7 when u >= 0
    free_var.rows.push_back({{1.0, -1.0}, RowSense::Equal, -7.0});
    res = solve_lp(free_var);
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(res.objective == doctest::Approx(7.0));
}

TEST_CASE("chebyshev_fit: intercept-only midrange") {
    ChebyshevFit fit = chebyshev_fit({{1.0}, {1.0}}, {0.0, 10.0});
    REQUIRE(fit.ok);
    CHECK(fit.beta[0] == doctest::Approx(5.0));
    CHECK(fit.value == doctest::Approx(5.0));
}

TEST_CASE("chebyshev_fit: exact line through collinear points") {
    ChebyshevFit fit =
        chebyshev_fit({{1.0, 0.0}, {1.0, 1.0}, {1.0, 2.0}}, {0.0, 1.0, 2.0});
    REQUIRE(fit.ok);
    CHECK(fit.value == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(fit.beta[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(fit.beta[1] == doctest::Approx(1.0));
}

TEST_CASE("chebyshev_fit: equioscillation on a bump") {
    ChebyshevFit fit =
        chebyshev_fit({{1.0, 0.0}, {1.0, 1.0}, {1.0, 2.0}}, {0.0, 1.0, 0.0});
    REQUIRE(fit.ok);
    CHECK(fit.value == doctest::Approx(0.5));
    CHECK(fit.beta[0] == doctest::Approx(0.5));
    CHECK(fit.beta[1] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("simplex: random LPs are feasible-optimal against sampling") {
    Rng rng(77);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t nv = 1 + rng.below(3);
        LpProblem lp = make_lp(nv);
        for (std::size_t j = 0; j < nv; ++j) {
            lp.objective[j] = rng.normal(0, 1);
            lp.lower[j] = -2.0 - 3.0 * rng.uniform();
            lp.upper[j] = 2.0 + 3.0 * rng.uniform();
        }
        const std::size_t rows = 1 + rng.below(4);
        for (std::size_t r = 0; r < rows; ++r) {
            LpRow row;
            row.coeffs.resize(nv);
            for (double& c : row.coeffs) c = rng.normal(0, 1);
            row.sense = rng.uniform() < 0.5 ? RowSense::LessEqual : RowSense::GreaterEqual;
            row.rhs = rng.normal(0, 2);
            lp.rows.push_back(row);
        }
        LpResult res = solve_lp(lp);
        if (res.status != LpStatus::Optimal) continue;

        // solution satisfies every row and bound
        for (std::size_t j = 0; j < nv; ++j) {
            CHECK(res.x[j] >= lp.lower[j] - 1e-7);
            CHECK(res.x[j] <= lp.upper[j] + 1e-7);
        }
        for (const LpRow& row : lp.rows) {
            double lhs = 0.0;
            for (std::size_t j = 0; j < nv; ++j) lhs += row.coeffs[j] * res.x[j];
            if (row.sense == RowSense::LessEqual) CHECK(lhs <= row.rhs + 1e-7);
            if (row.sense == RowSense::GreaterEqual) CHECK(lhs >= row.rhs - 1e-7);
        }
        // no sampled feasible point beats the reported optimum
        for (int sample = 0; sample < 300; ++sample) {
            std::vector<double> x(nv);
            for (std::size_t j = 0; j < nv; ++j)
                x[j] = lp.lower[j] + (lp.upper[j] - lp.lower[j]) * rng.uniform();
            bool feasible = true;
            for (const LpRow& row : lp.rows) {
                double lhs = 0.0;
                for (std::size_t j = 0; j < nv; ++j) lhs += row.coeffs[j] * x[j];
                if (row.sense == RowSense::LessEqual && lhs > row.rhs) feasible = false;
                if (row.sense == RowSense::GreaterEqual && lhs < row.rhs) feasible = false;
            }
            if (!feasible) continue;
            double val = 0.0;
            for (std::size_t j = 0; j < nv; ++j) val += lp.objective[j] * x[j];
            CHECK(val >= res.objective - 1e-7);
        }
    }
}
