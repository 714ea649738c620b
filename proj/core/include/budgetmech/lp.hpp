#pragma once

#include "budgetmech/rational.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace budgetmech::lp {

struct Term {
    int var;
    Rat coef;
};
using LinearForm = std::vector<Term>;

enum class Relation { LessEq, Equal, GreaterEq };

struct Constraint {
    LinearForm lhs;
    Relation rel;
    Rat rhs;
    std::string name;
};

/// Maximization program over named variables. Variables are free unless
/// declared nonneg; every constraint is explicit.
class LinearProgram {
public:
    int add_variable(std::string name, bool nonneg = false);
    int add_constraint(LinearForm lhs, Relation rel, Rat rhs, std::string name = "");
    void set_objective(LinearForm maximize);

    int num_vars() const { return static_cast<int>(var_names_.size()); }
    int num_constraints() const { return static_cast<int>(constraints_.size()); }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    const LinearForm& objective() const { return objective_; }
    const std::string& var_name(int i) const { return var_names_.at(i); }
    bool var_nonneg(int i) const { return var_nonneg_.at(i); }

    /// Throws on out-of-range variable references.
    void validate() const;

private:
    std::vector<std::string> var_names_;
    std::vector<bool> var_nonneg_;
    LinearForm objective_;
    std::vector<Constraint> constraints_;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded };

/// Constraint multipliers proving optimality: mu_r >= 0 for <= rows,
/// mu_r <= 0 for >= rows, free for = rows; the weighted combination of
/// constraint rows dominates the objective coefficient-wise and evaluates
/// to the optimal value. Verified exactly by verify_certificate.
struct DualCertificate {
    std::vector<Rat> multipliers;  // one per constraint
};

struct LpSolution {
    SolveStatus status = SolveStatus::Infeasible;
    Rat value;
    std::vector<Rat> assignment;  // per variable; empty unless Optimal
    DualCertificate dual;
    std::uint64_t pivots = 0;
};

/// Exact rational two-phase simplex with Bland's anti-cycling rule.
LpSolution solve_lp(const LinearProgram& lp);

/// Debug dump for failure reproduction; not a stable format.
nlohmann::ordered_json lp_to_debug_json(const LinearProgram& lp);

/// Exact re-check of an Optimal solution: primal feasibility, objective
/// value, and the dual certificate. Returns an error description or
/// nullopt when everything holds.
std::optional<std::string> verify_certificate(const LinearProgram& lp, const LpSolution& sol);

/// One endogenous on/off decision: the "on" branch imposes on_constraints,
/// the "off" branch imposes off_constraints tightened by delta
/// (rhs + delta for >=, rhs - delta for <=, unchanged for =).
struct Indicator {
    std::string id;
    std::vector<Constraint> on_constraints;
    std::vector<Constraint> off_constraints;
};

struct BranchSpec {
    std::vector<Indicator> indicators;
    Rat delta = 0;
};

struct BranchOptions {
    std::size_t indicator_cap = 20;
    std::uint64_t node_budget = 1u << 20;  // LP solves allowed per search
    /// Optional exact re-verification of a candidate optimum; a rejected
    /// leaf is discarded and the search continues with the next best.
    std::function<bool(const std::vector<Rat>&)> leaf_acceptor;
};

struct BranchResult {
    SolveStatus status = SolveStatus::Infeasible;
    Rat value;                    // best accepted leaf value at the given delta
    std::vector<Rat> argmax;
    std::string pattern;          // '1' = on, '0' = off, per indicator
    Rat relaxation_bound;         // upper bound: best value with delta = 0
    std::uint64_t nodes = 0;
    std::uint64_t leaves = 0;
    std::uint64_t rejected_leaves = 0;
    std::uint64_t pivots = 0;
};

/// Depth-first search over indicator patterns. A node's LP omits all
/// undecided indicators, so its value bounds every completion; a node whose
/// optimum satisfies one side of every undecided indicator closes as a leaf
/// with the pattern read off the optimum. Throws when the indicator count
/// exceeds the cap or the node budget runs out (reduce the instance or
/// raise the budgets).
BranchResult branch_solve(const LinearProgram& lp, const BranchSpec& spec,
                          const BranchOptions& opts = {});

}  // namespace budgetmech::lp
