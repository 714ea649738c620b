#pragma once

#include "budgetmech/feasibility.hpp"
#include "budgetmech/lp.hpp"
#include "budgetmech/types.hpp"

#include <nlohmann/json_fwd.hpp>

namespace budgetmech {

struct SolveDiagnostics {
    std::uint64_t lp_pivots = 0;
    std::uint64_t nodes = 0;
    std::uint64_t leaves = 0;
    std::uint64_t rejected_leaves = 0;
    std::uint64_t assignments = 0;  // menu-slot assignments enumerated
};

/// A certified solve: `value` is attained by `witness` (re-verified against
/// the class constraints, exact), `upper_bound >= value` bounds the class
/// optimum. The two coincide whenever the class admits a plain LP; for the
/// full class they bracket the supremum.
struct SolveResult {
    ClassSpec cls;
    Rat value;
    Rat upper_bound;
    Mechanism witness;
    std::string pattern;  // affordability pattern for full-class solves
    SolveDiagnostics diagnostics;
};

struct SolveOptions {
    std::size_t indicator_cap = 20;
    std::uint64_t node_budget = 1u << 20;
    std::uint64_t assignment_cap = 1u << 20;
    int oracle_grid_cap = 128;
    Rat delta = 0;  // strictness gap for "unaffordable" branches
};

/// Exact optimum for the SIC or CB constraint family (plain LP; deviation
/// pairs are unconditional for SIC and budget-downward for CB).
SolveResult optimal_lp_class(const BuyerDistribution& d, const ClassSpec& cls,
                             const SolveOptions& opts = {});

/// Optimum over the full class, where a deviation constraint applies only
/// when the target lottery is affordable to the deviator. Affordability is
/// endogenous, so the solve branches over per-pair affordability patterns;
/// the returned value carries a witness verified feasible, and upper_bound
/// is the pattern relaxation bound.
SolveResult optimal_full(const BuyerDistribution& d, const SolveOptions& opts = {});

/// Optimum over mechanisms with menu size at most m: enumerates assignments
/// of support points to m shared lottery slots (the trivial lottery rides
/// along for free) and solves each assignment as a full-class program with
/// tied variables.
SolveResult optimal_menu_limited(const BuyerDistribution& d, int m,
                                 const SolveOptions& opts = {});

/// Best single posted price. Candidates are restricted to the support's
/// min(v, w) values: any optimal posted price can be raised to the next
/// such point without losing a buyer. Ties go to the lowest price.
SolveResult optimal_posted(const BuyerDistribution& d);

/// Independent grid-search lower bound for instances with at most 3 types:
/// per-type lotteries run over q in {0, 1/g, ..., 1} and actual win price
/// in {0, 1/g, ..., floor(g*Wmax)/g}; combinations are kept exactly when
/// they satisfy the class constraints. Converges to the class optimum from
/// below as g grows.
Rat brute_force_oracle(const BuyerDistribution& d, const ClassSpec& cls, int grid,
                       const SolveOptions& opts = {});

nlohmann::ordered_json solve_result_to_json(const SolveResult& r);

}  // namespace budgetmech
