#include "lqs/solver.hpp"

#include "lqs/milp.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace lqs;

TEST_CASE("parse_solution_file: pairs, comments, banners, errors") {
    auto values = parse_solution_file("x 1.0\ny 0\n");
    CHECK(values.at("x") == doctest::Approx(1.0));
    CHECK(values.at("y") == doctest::Approx(0.0));
    CHECK(values.count("z") == 0); // missing names default to zero downstream

    values = parse_solution_file(
        "# status optimal\nSolver banner with words\n\nx 2.5\n");
    CHECK(values.size() == 1);
    CHECK(values.at("x") == doctest::Approx(2.5));

    CHECK_THROWS_WITH_AS(parse_solution_file("x abc\n"),
                         doctest::Contains("line 1"), std::runtime_error);
}

namespace {

MilpModel trivial_continuous() {
    MilpModel m;
    VarId x = m.add_continuous("x", 0.0, std::numeric_limits<double>::infinity());
    m.add_ge("floor", {{x, 1.0}}, 3.0);
    m.set_objective({{x, 1.0}});
    return m;
}

} // namespace

TEST_CASE("subprocess backend: LP, MILP, infeasible" * doctest::timeout(300)) {
    auto solver = make_solver();
    SolveParams params;
    params.time_limit = 60.0;

    SUBCASE("min x subject to x >= 3") {
        SolveResult res = solver->solve(trivial_continuous(), params);
        REQUIRE(res.status == SolveStatus::Optimal);
        CHECK(res.objective == doctest::Approx(3.0));
        CHECK(res.incumbent.at("x") == doctest::Approx(3.0));
        CHECK(res.bound <= res.objective + 1e-6);
    }

    SUBCASE("three binaries, at least two set") {
        MilpModel m;
        std::vector<LinTerm> sum, obj;
        for (int i = 0; i < 3; ++i) {
            VarId b = m.add_binary("b" + std::to_string(i));
            sum.push_back({b, 1.0});
            obj.push_back({b, 1.0});
        }
        m.add_ge("atleast", std::move(sum), 2.0);
        m.set_objective(std::move(obj));
        SolveResult res = solver->solve(m, params);
        REQUIRE(res.status == SolveStatus::Optimal);
        CHECK(res.objective == doctest::Approx(2.0));
    }

    SUBCASE("infeasible box") {
        MilpModel m;
        VarId x = m.add_continuous("x", 0.0, std::numeric_limits<double>::infinity());
        m.add_le("roof", {{x, 1.0}}, 0.0);
        m.add_ge("floor", {{x, 1.0}}, 1.0);
        m.set_objective({{x, 1.0}});
        SolveResult res = solver->solve(m, params);
        CHECK(res.status == SolveStatus::Infeasible);
    }

    SUBCASE("objective constant carried through the file") {
        MilpModel m = trivial_continuous();
        m.set_objective({{m.find_var("x").value(), 1.0}}, 10.0);
        SolveResult res = solver->solve(m, params);
        REQUIRE(res.status == SolveStatus::Optimal);
        CHECK(res.objective == doctest::Approx(13.0));
    }

    SUBCASE("LP relaxation of a MILP") {
        MilpModel m;
        VarId b = m.add_binary("b");
        m.add_ge("half", {{b, 1.0}}, 0.5);
        m.set_objective({{b, 1.0}});
        SolveParams relax = params;
        relax.relax_integrality = true;
        SolveResult res = solver->solve(m, relax);
        REQUIRE(res.status == SolveStatus::Optimal);
        CHECK(res.objective == doctest::Approx(0.5));
        SolveResult integral = solver->solve(m, params);
        CHECK(integral.objective == doctest::Approx(1.0));
    }
}

TEST_CASE("subprocess backend: determinism across repeats" * doctest::timeout(300)) {
    auto solver = make_solver();
    SolveParams params;
    params.time_limit = 60.0;
    params.seed = 42;

    MilpModel m;
    std::vector<LinTerm> knap, obj;
    for (int i = 0; i < 8; ++i) {
        VarId b = m.add_binary("b" + std::to_string(i));
        knap.push_back({b, 1.0 + 0.1 * i});
        obj.push_back({b, -1.0 - 0.03 * static_cast<double>(i * i % 5)});
    }
    m.add_le("cap", std::move(knap), 4.0);
    m.set_objective(std::move(obj));

    SolveResult first = solver->solve(m, params);
    SolveResult second = solver->solve(m, params);
    REQUIRE(first.status == SolveStatus::Optimal);
    REQUIRE(second.status == SolveStatus::Optimal);
    CHECK(first.objective == doctest::Approx(second.objective).epsilon(1e-9));
    CHECK(first.bound <= first.objective + 1e-6);
}

TEST_CASE("subprocess backend: one-shot command mode" * doctest::timeout(300)) {
    SolverConfig cfg = SolverConfig::defaults();
    cfg.server_command.clear(); // force the per-call path
    REQUIRE_FALSE(cfg.command.empty());
    SubprocessSolver solver(cfg);
    SolveParams params;
    params.time_limit = 60.0;
    SolveResult res = solver.solve(trivial_continuous(), params);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.objective == doctest::Approx(3.0));
}

TEST_CASE("subprocess backend: missing executable reports an error") {
    SolverConfig cfg;
    cfg.command = "/nonexistent/solver-binary {model} {solution}";
    SubprocessSolver solver(cfg);
    SolveResult res = solver.solve(trivial_continuous(), SolveParams{});
    CHECK(res.status == SolveStatus::Error);
    CHECK_FALSE(res.message.empty());
}

TEST_CASE("solver config: file parsing and missing-config error") {
    CHECK_THROWS_AS(SolverConfig::from_file("/nonexistent/path.toml"),
                    std::runtime_error);
    SolverConfig empty;
    CHECK_THROWS_AS(SubprocessSolver{empty}, std::runtime_error);
}

TEST_CASE("solve params validation") {
    SolveParams p;
    p.time_limit = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.time_limit = 10.0;
    p.rel_gap_target = 1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
