#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "budgetmech/errors.hpp"
#include "budgetmech/lp.hpp"

#include <nlohmann/json.hpp>

#include <random>

using namespace budgetmech;
using namespace budgetmech::lp;

namespace {

// max (1/H) s1 + (1 - 1/H) s2 under bounds, participation, budget rows and
// the unconditional incentive rows of the two-type fixture; v1/w1/v2/w2
// parameterize the types.
LinearProgram two_type_program(const Rat& f1, const Rat& v1, const Rat& w1, const Rat& v2,
                               const Rat& w2) {
    LinearProgram prog;
    const int x1 = prog.add_variable("x1", true);
    const int s1 = prog.add_variable("s1", true);
    const int x2 = prog.add_variable("x2", true);
    const int s2 = prog.add_variable("s2", true);
    prog.add_constraint({{x1, Rat(1)}}, Relation::LessEq, Rat(1), "x1cap");
    prog.add_constraint({{x2, Rat(1)}}, Relation::LessEq, Rat(1), "x2cap");
    prog.add_constraint({{s1, Rat(1)}, {x1, -v1}}, Relation::LessEq, Rat(0), "ir1");
    prog.add_constraint({{s2, Rat(1)}, {x2, -v2}}, Relation::LessEq, Rat(0), "ir2");
    prog.add_constraint({{s1, Rat(1)}, {x1, -w1}}, Relation::LessEq, Rat(0), "bf1");
    prog.add_constraint({{s2, Rat(1)}, {x2, -w2}}, Relation::LessEq, Rat(0), "bf2");
    prog.add_constraint({{x1, v1}, {s1, Rat(-1)}, {x2, -v1}, {s2, Rat(1)}},
                        Relation::GreaterEq, Rat(0), "ic12");
    prog.add_constraint({{x2, v2}, {s2, Rat(-1)}, {x1, -v2}, {s1, Rat(1)}},
                        Relation::GreaterEq, Rat(0), "ic21");
    prog.set_objective({{s1, f1}, {s2, 1 - f1}});
    return prog;
}

}  // namespace

TEST_CASE("one-variable program") {
    LinearProgram prog;
    const int x = prog.add_variable("x");
    prog.add_constraint({{x, Rat(1)}}, Relation::LessEq, Rat(3));
    prog.add_constraint({{x, Rat(1)}}, Relation::GreaterEq, Rat(0));
    prog.set_objective({{x, Rat(1)}});
    const auto sol = solve_lp(prog);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.value == 3);
    CHECK(sol.assignment[0] == 3);
    CHECK(!verify_certificate(prog, sol));
}

TEST_CASE("unbounded and infeasible detection") {
    LinearProgram up;
    const int x = up.add_variable("x", true);
    up.set_objective({{x, Rat(1)}});
    CHECK(solve_lp(up).status == SolveStatus::Unbounded);

    LinearProgram infeas;
    const int y = infeas.add_variable("y", true);
    infeas.add_constraint({{y, Rat(1)}}, Relation::LessEq, Rat(-1));
    infeas.set_objective({{y, Rat(1)}});
    CHECK(solve_lp(infeas).status == SolveStatus::Infeasible);
}

TEST_CASE("equality rows and free variables") {
    LinearProgram prog;
    const int a = prog.add_variable("a");
    const int b = prog.add_variable("b");
    prog.add_constraint({{a, Rat(1)}, {b, Rat(1)}}, Relation::Equal, Rat(2));
    prog.add_constraint({{a, Rat(1)}, {b, Rat(-1)}}, Relation::LessEq, Rat(1));
    prog.set_objective({{a, Rat(1)}});
    const auto sol = solve_lp(prog);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.value == Rat(3, 2));
    CHECK(!verify_certificate(prog, sol));
}

TEST_CASE("two-type strong-incentive fixture: base value 3, shifted value 1") {
    // H = 4: types (4, 1) mass 1/4 and (4, 4) mass 3/4
    const auto base = two_type_program(Rat(1, 4), Rat(4), Rat(1), Rat(4), Rat(4));
    const auto base_sol = solve_lp(base);
    REQUIRE(base_sol.status == SolveStatus::Optimal);
    CHECK(base_sol.value == 3);
    CHECK(!verify_certificate(base, base_sol));

    // raising the low-budget valuation to 5 collapses the optimum to 1
    const auto shifted = two_type_program(Rat(1, 4), Rat(5), Rat(1), Rat(4), Rat(4));
    const auto shifted_sol = solve_lp(shifted);
    REQUIRE(shifted_sol.status == SolveStatus::Optimal);
    CHECK(shifted_sol.value == 1);
    CHECK(!verify_certificate(shifted, shifted_sol));
}

TEST_CASE("dual certificates on random programs") {
    std::mt19937_64 rng(7);
    int optima = 0;
    for (int round = 0; round < 120; ++round) {
        LinearProgram prog;
        const int nvars = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < nvars; ++i) {
            prog.add_variable("v" + std::to_string(i), rng() % 2 == 0);
        }
        LinearForm obj;
        for (int i = 0; i < nvars; ++i) {
            obj.push_back({i, Rat(static_cast<long>(rng() % 11) - 5, 1 + rng() % 3)});
        }
        prog.set_objective(obj);
        const int rows = 1 + static_cast<int>(rng() % 5);
        for (int r = 0; r < rows; ++r) {
            LinearForm lhs;
            for (int i = 0; i < nvars; ++i) {
                lhs.push_back({i, Rat(static_cast<long>(rng() % 9) - 4, 1 + rng() % 2)});
            }
            const auto rel = std::array{Relation::LessEq, Relation::Equal,
                                        Relation::GreaterEq}[rng() % 3];
            prog.add_constraint(lhs, rel, Rat(static_cast<long>(rng() % 13) - 4));
        }
        // box everything so Optimal is common
        for (int i = 0; i < nvars; ++i) {
            prog.add_constraint({{i, Rat(1)}}, Relation::LessEq, Rat(6));
            prog.add_constraint({{i, Rat(1)}}, Relation::GreaterEq, Rat(-6));
        }
        const auto sol = solve_lp(prog);
        if (sol.status == SolveStatus::Optimal) {
            ++optima;
            const auto bad = verify_certificate(prog, sol);
            if (bad) FAIL("certificate rejected: ", *bad);
        }
    }
    CHECK(optima > 40);
}

TEST_CASE("branch with zero indicators equals solve_lp") {
    auto prog = two_type_program(Rat(1, 4), Rat(4), Rat(1), Rat(4), Rat(4));
    const auto direct = solve_lp(prog);
    const auto branched = branch_solve(prog, {});
    REQUIRE(branched.status == SolveStatus::Optimal);
    CHECK(branched.value == direct.value);
    CHECK(branched.relaxation_bound == direct.value);
    CHECK(branched.pattern.empty());
}

TEST_CASE("single indicator picks the better side") {
    LinearProgram prog;
    const int x = prog.add_variable("x", true);
    prog.add_constraint({{x, Rat(1)}}, Relation::LessEq, Rat(5));
    prog.set_objective({{x, Rat(1)}});
    BranchSpec spec;
    Indicator ind;
    ind.id = "toggle";
    ind.on_constraints.push_back({{{x, Rat(1)}}, Relation::LessEq, Rat(1), "low"});
    ind.off_constraints.push_back({{{x, Rat(1)}}, Relation::GreaterEq, Rat(2), "high"});
    spec.indicators.push_back(ind);
    const auto res = branch_solve(prog, spec);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.value == 5);
    CHECK(res.pattern == "0");
    CHECK(res.relaxation_bound == 5);
}

TEST_CASE("branch value is non-increasing in delta and below the relaxation bound") {
    LinearProgram prog;
    const int x = prog.add_variable("x", true);
    const int y = prog.add_variable("y", true);
    prog.add_constraint({{x, Rat(1)}}, Relation::LessEq, Rat(4));
    prog.add_constraint({{y, Rat(1)}}, Relation::LessEq, Rat(3));
    prog.set_objective({{x, Rat(1)}, {y, Rat(1)}});

    Indicator ind;
    ind.id = "cut";
    ind.on_constraints.push_back({{{x, Rat(1)}}, Relation::LessEq, Rat(1), "on"});
    ind.off_constraints.push_back({{{x, Rat(1)}, {y, Rat(1)}}, Relation::GreaterEq, Rat(5), "off"});
    // With "off" imposed, x + y >= 5 + delta is binding only through the
    // caps, so larger delta cannot raise the optimum.
    Rat previous;
    bool first = true;
    for (const Rat& delta : {Rat(0), Rat(1, 10), Rat(1), Rat(2)}) {
        BranchSpec spec;
        spec.indicators.push_back(ind);
        spec.delta = delta;
        const auto res = branch_solve(prog, spec);
        REQUIRE(res.status == SolveStatus::Optimal);
        CHECK(res.value <= res.relaxation_bound);
        if (!first) CHECK(res.value <= previous);
        previous = res.value;
        first = false;
    }
}

TEST_CASE("leaf acceptor rejections fall back to the next-best leaf") {
    LinearProgram prog;
    const int x = prog.add_variable("x", true);
    prog.add_constraint({{x, Rat(1)}}, Relation::LessEq, Rat(5));
    prog.set_objective({{x, Rat(1)}});
    BranchSpec spec;
    Indicator ind;
    ind.id = "toggle";
    ind.on_constraints.push_back({{{x, Rat(1)}}, Relation::LessEq, Rat(1), "low"});
    ind.off_constraints.push_back({{{x, Rat(1)}}, Relation::GreaterEq, Rat(2), "high"});
    spec.indicators.push_back(ind);
    BranchOptions opts;
    opts.leaf_acceptor = [](const std::vector<Rat>& a) { return a[0] <= 1; };
    const auto res = branch_solve(prog, spec, opts);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.value == 1);
    CHECK(res.pattern == "1");
    CHECK(res.relaxation_bound == 5);
    CHECK(res.rejected_leaves >= 1);
}

TEST_CASE("debug dump captures the whole program") {
    LinearProgram prog;
    const int x = prog.add_variable("x", true);
    prog.add_constraint({{x, Rat(1)}}, Relation::LessEq, Rat(3, 2), "cap");
    prog.set_objective({{x, Rat(2)}});
    const auto j = lp_to_debug_json(prog);
    CHECK(j["variables"][0]["name"] == "x");
    CHECK(j["constraints"][0]["rel"] == "<=");
    CHECK(j["constraints"][0]["rhs"] == "3/2");
    CHECK(j["objective"][0]["coef"] == "2");
}

TEST_CASE("indicator cap and malformed programs raise errors") {
    LinearProgram prog;
    const int x = prog.add_variable("x", true);
    prog.set_objective({{x, Rat(1)}});
    prog.add_constraint({{x, Rat(1)}}, Relation::LessEq, Rat(1));

    BranchSpec spec;
    for (int i = 0; i < 25; ++i) {
        Indicator ind;
        ind.id = std::to_string(i);
        ind.on_constraints.push_back({{{x, Rat(1)}}, Relation::LessEq, Rat(1), "a"});
        ind.off_constraints.push_back({{{x, Rat(1)}}, Relation::GreaterEq, Rat(1), "b"});
        spec.indicators.push_back(ind);
    }
    CHECK_THROWS_AS(branch_solve(prog, spec), BudgetExceeded);

    LinearProgram broken;
    broken.add_variable("x");
    broken.set_objective({{3, Rat(1)}});
    CHECK_THROWS_AS(solve_lp(broken), std::invalid_argument);
}
