#include "budgetmech/lp.hpp"

#include "budgetmech/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <stdexcept>

namespace budgetmech::lp {

int LinearProgram::add_variable(std::string name, bool nonneg) {
    var_names_.push_back(std::move(name));
    var_nonneg_.push_back(nonneg);
    return static_cast<int>(var_names_.size()) - 1;
}

int LinearProgram::add_constraint(LinearForm lhs, Relation rel, Rat rhs, std::string name) {
    constraints_.push_back({std::move(lhs), rel, std::move(rhs), std::move(name)});
    return static_cast<int>(constraints_.size()) - 1;
}

void LinearProgram::set_objective(LinearForm maximize) {
    objective_ = std::move(maximize);
}

namespace {

void check_form(const LinearForm& form, int nvars, const std::string& where) {
    for (const auto& t : form) {
        if (t.var < 0 || t.var >= nvars) {
            throw std::invalid_argument("linear program: " + where + " references variable #" +
                                        std::to_string(t.var) + " of " + std::to_string(nvars));
        }
    }
}

Rat eval_form(const LinearForm& form, const std::vector<Rat>& x) {
    Rat acc = 0;
    for (const auto& t : form) acc += t.coef * x[static_cast<size_t>(t.var)];
    return acc;
}

bool holds(const Constraint& c, const std::vector<Rat>& x) {
    const Rat lhs = eval_form(c.lhs, x);
    switch (c.rel) {
        case Relation::LessEq: return lhs <= c.rhs;
        case Relation::Equal: return lhs == c.rhs;
        case Relation::GreaterEq: return lhs >= c.rhs;
    }
    return false;
}

// Dense standard-form tableau: structural columns (free variables split
// into a difference of nonnegatives), then one or two bookkeeping columns
// per row. Every row keeps a +1 unit column for reading the dual off the
// final tableau.
struct Simplex {
    int m = 0;
    int ncols = 0;
    std::vector<std::vector<Rat>> T;
    std::vector<Rat> rhs;
    std::vector<Rat> cost;      // phase-2 objective per column
    std::vector<Rat> red;       // reduced-cost row for the running phase
    std::vector<int> basis;
    std::vector<bool> is_artificial;
    std::vector<int> unit_col;  // per row
    std::vector<int> row_sign;  // std row multiplier -> user row multiplier
    std::vector<std::pair<int, int>> struct_of_col;  // (user var, +1/-1); (-1,0) for bookkeeping
    std::uint64_t pivots = 0;

    void pivot(int r, int j) {
        const Rat piv = T[static_cast<size_t>(r)][static_cast<size_t>(j)];
        auto& row = T[static_cast<size_t>(r)];
        for (auto& e : row) e /= piv;
        rhs[static_cast<size_t>(r)] /= piv;
        for (int r2 = 0; r2 < m; ++r2) {
            if (r2 == r) continue;
            const Rat f = T[static_cast<size_t>(r2)][static_cast<size_t>(j)];
            if (f == 0) continue;
            auto& row2 = T[static_cast<size_t>(r2)];
            for (int c = 0; c < ncols; ++c) {
                if (row[static_cast<size_t>(c)] != 0)
                    row2[static_cast<size_t>(c)] -= f * row[static_cast<size_t>(c)];
            }
            rhs[static_cast<size_t>(r2)] -= f * rhs[static_cast<size_t>(r)];
        }
        const Rat f = red[static_cast<size_t>(j)];
        if (f != 0) {
            for (int c = 0; c < ncols; ++c) {
                if (row[static_cast<size_t>(c)] != 0)
                    red[static_cast<size_t>(c)] -= f * row[static_cast<size_t>(c)];
            }
        }
        basis[static_cast<size_t>(r)] = j;
        ++pivots;
    }

    void reset_reduced_costs(const std::vector<Rat>& phase_cost) {
        red.assign(static_cast<size_t>(ncols), Rat(0));
        for (int c = 0; c < ncols; ++c) {
            Rat z = 0;
            for (int r = 0; r < m; ++r) {
                const Rat& cb = phase_cost[static_cast<size_t>(basis[static_cast<size_t>(r)])];
                if (cb != 0) z += cb * T[static_cast<size_t>(r)][static_cast<size_t>(c)];
            }
            red[static_cast<size_t>(c)] = phase_cost[static_cast<size_t>(c)] - z;
        }
    }

    // Bland's rule; returns false when no entering column remains.
    // forbid_artificials blocks artificial columns from entering (phase 2).
    // Returns Unbounded via flag.
    enum class StepResult { Improved, Done, Unbounded };
    StepResult step(bool forbid_artificials) {
        int enter = -1;
        for (int j = 0; j < ncols; ++j) {
            if (forbid_artificials && is_artificial[static_cast<size_t>(j)]) continue;
            if (red[static_cast<size_t>(j)] > 0) {
                enter = j;
                break;
            }
        }
        if (enter < 0) return StepResult::Done;
        int leave = -1;
        Rat best_ratio;
        for (int r = 0; r < m; ++r) {
            const Rat& a = T[static_cast<size_t>(r)][static_cast<size_t>(enter)];
            if (a <= 0) continue;
            const Rat ratio = rhs[static_cast<size_t>(r)] / a;
            if (leave < 0 || ratio < best_ratio ||
                (ratio == best_ratio &&
                 basis[static_cast<size_t>(r)] < basis[static_cast<size_t>(leave)])) {
                leave = r;
                best_ratio = ratio;
            }
        }
        if (leave < 0) return StepResult::Unbounded;
        pivot(leave, enter);
        return StepResult::Improved;
    }
};

Simplex build_standard_form(const LinearProgram& lp) {
    Simplex s;
    const int nvars = lp.num_vars();
    s.m = lp.num_constraints();

    // structural columns
    std::vector<std::vector<int>> cols_of_var(static_cast<size_t>(nvars));
    for (int k = 0; k < nvars; ++k) {
        cols_of_var[static_cast<size_t>(k)].push_back(static_cast<int>(s.struct_of_col.size()));
        s.struct_of_col.emplace_back(k, 1);
        if (!lp.var_nonneg(k)) {
            cols_of_var[static_cast<size_t>(k)].push_back(static_cast<int>(s.struct_of_col.size()));
            s.struct_of_col.emplace_back(k, -1);
        }
    }
    const int nstruct = static_cast<int>(s.struct_of_col.size());

    // Row scan to size the bookkeeping block: <= rows with nonneg rhs get a
    // slack only; everything else gets (surplus +) artificial.
    struct RowPlan {
        std::vector<Rat> coef;  // dense structural coefficients, sign-adjusted
        Rat rhs;
        Relation rel;  // LessEq / Equal / GreaterEq after normalization
        int sign;
    };
    std::vector<RowPlan> rows;
    rows.reserve(static_cast<size_t>(s.m));
    for (const auto& c : lp.constraints()) {
        RowPlan rp;
        rp.coef.assign(static_cast<size_t>(nvars), Rat(0));
        for (const auto& t : c.lhs) rp.coef[static_cast<size_t>(t.var)] += t.coef;
        rp.rhs = c.rhs;
        rp.rel = c.rel;
        rp.sign = 1;
        if (rp.rel == Relation::GreaterEq) {
            for (auto& e : rp.coef) e = -e;
            rp.rhs = -rp.rhs;
            rp.rel = Relation::LessEq;
            rp.sign = -rp.sign;
        }
        if (rp.rhs < 0) {
            for (auto& e : rp.coef) e = -e;
            rp.rhs = -rp.rhs;
            rp.sign = -rp.sign;
            if (rp.rel == Relation::LessEq) rp.rel = Relation::GreaterEq;
        }
        rows.push_back(std::move(rp));
    }

    int extra = 0;
    for (const auto& rp : rows) {
        extra += (rp.rel == Relation::LessEq) ? 1 : (rp.rel == Relation::GreaterEq ? 2 : 1);
    }
    s.ncols = nstruct + extra;
    while (static_cast<int>(s.struct_of_col.size()) < s.ncols) s.struct_of_col.emplace_back(-1, 0);
    s.is_artificial.assign(static_cast<size_t>(s.ncols), false);
    s.T.assign(static_cast<size_t>(s.m),
               std::vector<Rat>(static_cast<size_t>(s.ncols), Rat(0)));
    s.rhs.assign(static_cast<size_t>(s.m), Rat(0));
    s.basis.assign(static_cast<size_t>(s.m), -1);
    s.unit_col.assign(static_cast<size_t>(s.m), -1);
    s.row_sign.assign(static_cast<size_t>(s.m), 1);

    int next = nstruct;
    for (int r = 0; r < s.m; ++r) {
        const auto& rp = rows[static_cast<size_t>(r)];
        auto& row = s.T[static_cast<size_t>(r)];
        for (int k = 0; k < nvars; ++k) {
            const Rat& a = rp.coef[static_cast<size_t>(k)];
            if (a == 0) continue;
            for (int col : cols_of_var[static_cast<size_t>(k)]) {
                row[static_cast<size_t>(col)] =
                    a * s.struct_of_col[static_cast<size_t>(col)].second;
            }
        }
        s.rhs[static_cast<size_t>(r)] = rp.rhs;
        s.row_sign[static_cast<size_t>(r)] = rp.sign;
        if (rp.rel == Relation::LessEq) {
            row[static_cast<size_t>(next)] = 1;  // slack, initial basis
            s.unit_col[static_cast<size_t>(r)] = next;
            s.basis[static_cast<size_t>(r)] = next;
            ++next;
        } else {
            if (rp.rel == Relation::GreaterEq) {
                row[static_cast<size_t>(next)] = -1;  // surplus
                ++next;
            }
            row[static_cast<size_t>(next)] = 1;  // artificial, initial basis
            s.is_artificial[static_cast<size_t>(next)] = true;
            s.unit_col[static_cast<size_t>(r)] = next;
            s.basis[static_cast<size_t>(r)] = next;
            ++next;
        }
    }

    // phase-2 costs
    s.cost.assign(static_cast<size_t>(s.ncols), Rat(0));
    std::vector<Rat> obj(static_cast<size_t>(nvars), Rat(0));
    for (const auto& t : lp.objective()) obj[static_cast<size_t>(t.var)] += t.coef;
    for (int c = 0; c < nstruct; ++c) {
        const auto& [var, sign] = s.struct_of_col[static_cast<size_t>(c)];
        s.cost[static_cast<size_t>(c)] = obj[static_cast<size_t>(var)] * sign;
    }
    return s;
}

constexpr std::uint64_t kPivotGuard = 2'000'000;

}  // namespace

void LinearProgram::validate() const {
    check_form(objective_, num_vars(), "objective");
    for (const auto& c : constraints_) check_form(c.lhs, num_vars(), "constraint '" + c.name + "'");
}

LpSolution solve_lp(const LinearProgram& lp) {
    lp.validate();
    Simplex s = build_standard_form(lp);
    LpSolution sol;

    bool need_phase1 = false;
    for (int r = 0; r < s.m; ++r) {
        if (s.is_artificial[static_cast<size_t>(s.basis[static_cast<size_t>(r)])]) {
            need_phase1 = true;
            break;
        }
    }

    if (need_phase1) {
        std::vector<Rat> phase1(static_cast<size_t>(s.ncols), Rat(0));
        for (int c = 0; c < s.ncols; ++c) {
            if (s.is_artificial[static_cast<size_t>(c)]) phase1[static_cast<size_t>(c)] = -1;
        }
        s.reset_reduced_costs(phase1);
        while (true) {
            if (s.pivots > kPivotGuard) throw std::logic_error("simplex pivot guard tripped");
            const auto st = s.step(false);
            if (st == Simplex::StepResult::Done) break;
            if (st == Simplex::StepResult::Unbounded) {
                throw std::logic_error("phase-1 objective cannot be unbounded");
            }
        }
        Rat infeas = 0;
        for (int r = 0; r < s.m; ++r) {
            if (s.is_artificial[static_cast<size_t>(s.basis[static_cast<size_t>(r)])]) {
                infeas += s.rhs[static_cast<size_t>(r)];
            }
        }
        if (infeas != 0) {
            sol.status = SolveStatus::Infeasible;
            sol.pivots = s.pivots;
            return sol;
        }
        // Drive basic artificials out; rows that cannot pivot are redundant
        // and keep their artificial pinned at zero.
        for (int r = 0; r < s.m; ++r) {
            if (!s.is_artificial[static_cast<size_t>(s.basis[static_cast<size_t>(r)])]) continue;
            for (int j = 0; j < s.ncols; ++j) {
                if (s.is_artificial[static_cast<size_t>(j)]) continue;
                if (s.T[static_cast<size_t>(r)][static_cast<size_t>(j)] != 0) {
                    s.pivot(r, j);
                    break;
                }
            }
        }
    }

    s.reset_reduced_costs(s.cost);
    while (true) {
        if (s.pivots > kPivotGuard) throw std::logic_error("simplex pivot guard tripped");
        const auto st = s.step(true);
        if (st == Simplex::StepResult::Done) break;
        if (st == Simplex::StepResult::Unbounded) {
            sol.status = SolveStatus::Unbounded;
            sol.pivots = s.pivots;
            return sol;
        }
    }

    sol.status = SolveStatus::Optimal;
    sol.pivots = s.pivots;
    sol.assignment.assign(static_cast<size_t>(lp.num_vars()), Rat(0));
    Rat value = 0;
    for (int r = 0; r < s.m; ++r) {
        const int col = s.basis[static_cast<size_t>(r)];
        const auto& [var, sign] = s.struct_of_col[static_cast<size_t>(col)];
        if (var >= 0) {
            sol.assignment[static_cast<size_t>(var)] += sign * s.rhs[static_cast<size_t>(r)];
        }
        value += s.cost[static_cast<size_t>(col)] * s.rhs[static_cast<size_t>(r)];
    }
    sol.value = value;

    sol.dual.multipliers.assign(static_cast<size_t>(s.m), Rat(0));
    for (int r = 0; r < s.m; ++r) {
        Rat y = 0;
        const int uc = s.unit_col[static_cast<size_t>(r)];
        for (int r2 = 0; r2 < s.m; ++r2) {
            const Rat& cb = s.cost[static_cast<size_t>(s.basis[static_cast<size_t>(r2)])];
            if (cb != 0) y += cb * s.T[static_cast<size_t>(r2)][static_cast<size_t>(uc)];
        }
        sol.dual.multipliers[static_cast<size_t>(r)] = s.row_sign[static_cast<size_t>(r)] * y;
    }
    return sol;
}

std::optional<std::string> verify_certificate(const LinearProgram& lp, const LpSolution& sol) {
    if (sol.status != SolveStatus::Optimal) return "solution is not optimal";
    if (static_cast<int>(sol.assignment.size()) != lp.num_vars()) return "assignment size mismatch";
    if (static_cast<int>(sol.dual.multipliers.size()) != lp.num_constraints()) {
        return "multiplier count mismatch";
    }
    for (int k = 0; k < lp.num_vars(); ++k) {
        if (lp.var_nonneg(k) && sol.assignment[static_cast<size_t>(k)] < 0) {
            return "variable " + lp.var_name(k) + " negative";
        }
    }
    for (const auto& c : lp.constraints()) {
        if (!holds(c, sol.assignment)) return "primal violation of '" + c.name + "'";
    }
    if (eval_form(lp.objective(), sol.assignment) != sol.value) return "objective mismatch";

    Rat bound = 0;
    std::vector<Rat> combo(static_cast<size_t>(lp.num_vars()), Rat(0));
    for (int r = 0; r < lp.num_constraints(); ++r) {
        const auto& c = lp.constraints()[static_cast<size_t>(r)];
        const Rat& mu = sol.dual.multipliers[static_cast<size_t>(r)];
        if (c.rel == Relation::LessEq && mu < 0) return "negative multiplier on <= row";
        if (c.rel == Relation::GreaterEq && mu > 0) return "positive multiplier on >= row";
        if (mu == 0) continue;
        for (const auto& t : c.lhs) combo[static_cast<size_t>(t.var)] += mu * t.coef;
        bound += mu * c.rhs;
    }
    std::vector<Rat> obj(static_cast<size_t>(lp.num_vars()), Rat(0));
    for (const auto& t : lp.objective()) obj[static_cast<size_t>(t.var)] += t.coef;
    for (int k = 0; k < lp.num_vars(); ++k) {
        const Rat& ck = obj[static_cast<size_t>(k)];
        const Rat& sk = combo[static_cast<size_t>(k)];
        if (lp.var_nonneg(k)) {
            if (sk < ck) return "dual infeasible at variable " + lp.var_name(k);
        } else if (sk != ck) {
            return "dual combination misses free variable " + lp.var_name(k);
        }
    }
    if (bound != sol.value) return "dual bound does not meet the optimum";
    return std::nullopt;
}

nlohmann::ordered_json lp_to_debug_json(const LinearProgram& lp) {
    nlohmann::ordered_json j;
    j["variables"] = nlohmann::ordered_json::array();
    for (int i = 0; i < lp.num_vars(); ++i) {
        j["variables"].push_back({{"name", lp.var_name(i)}, {"nonneg", lp.var_nonneg(i)}});
    }
    auto form = [](const LinearForm& f) {
        nlohmann::ordered_json out = nlohmann::ordered_json::array();
        for (const auto& t : f) out.push_back({{"var", t.var}, {"coef", rat_str(t.coef)}});
        return out;
    };
    j["objective"] = form(lp.objective());
    j["constraints"] = nlohmann::ordered_json::array();
    for (const auto& c : lp.constraints()) {
        const char* rel = c.rel == Relation::LessEq ? "<=" : (c.rel == Relation::Equal ? "=" : ">=");
        j["constraints"].push_back(
            {{"name", c.name}, {"lhs", form(c.lhs)}, {"rel", rel}, {"rhs", rat_str(c.rhs)}});
    }
    return j;
}

namespace {

Constraint shifted(const Constraint& c, const Rat& delta) {
    Constraint out = c;
    if (delta == 0) return out;
    if (c.rel == Relation::GreaterEq) out.rhs = c.rhs + delta;
    if (c.rel == Relation::LessEq) out.rhs = c.rhs - delta;
    return out;
}

bool side_holds(const std::vector<Constraint>& cons, const std::vector<Rat>& x) {
    for (const auto& c : cons) {
        if (!holds(c, x)) return false;
    }
    return true;
}

bool same_constraint(const Constraint& a, const Constraint& b) {
    if (a.rel != b.rel || a.rhs != b.rhs || a.lhs.size() != b.lhs.size()) return false;
    for (size_t i = 0; i < a.lhs.size(); ++i) {
        if (a.lhs[i].var != b.lhs[i].var || a.lhs[i].coef != b.lhs[i].coef) return false;
    }
    return true;
}

struct SearchState {
    const LinearProgram* base = nullptr;
    const BranchSpec* spec = nullptr;
    const BranchOptions* opts = nullptr;
    Rat delta;
    bool track_relaxation = false;

    bool have_best = false;
    Rat best_value;
    std::vector<Rat> best_argmax;
    std::string best_pattern;
    bool have_relax = false;
    Rat relax;
    bool unbounded = false;
    std::uint64_t nodes = 0, leaves = 0, rejected = 0, pivots = 0;

    void note_relax(const Rat& v) {
        if (!have_relax || v > relax) {
            relax = v;
            have_relax = true;
        }
    }

    void explore(std::vector<int>& decided) {
        if (unbounded) return;
        if (nodes >= opts->node_budget) {
            throw BudgetExceeded(
                "branch search budget exceeded; reduce the instance or raise node_budget");
        }
        ++nodes;

        LinearProgram node = *base;
        for (size_t i = 0; i < spec->indicators.size(); ++i) {
            const auto& ind = spec->indicators[i];
            if (decided[i] == 1) {
                for (const auto& c : ind.on_constraints) node.add_constraint(c.lhs, c.rel, c.rhs, c.name);
            } else if (decided[i] == 0) {
                for (const auto& c : ind.off_constraints) {
                    const Constraint sc = shifted(c, delta);
                    node.add_constraint(sc.lhs, sc.rel, sc.rhs, sc.name);
                }
            }
        }
        LpSolution sol = solve_lp(node);
        pivots += sol.pivots;
        if (sol.status == SolveStatus::Infeasible) return;
        if (sol.status == SolveStatus::Unbounded) {
            unbounded = true;
            return;
        }
        note_relax(sol.value);
        if (have_best && sol.value <= best_value) return;  // bound

        // A node optimum that satisfies one side of every undecided
        // indicator is optimal for its completed pattern.
        int branch_on = -1;
        std::string completion;
        completion.reserve(spec->indicators.size());
        for (size_t i = 0; i < spec->indicators.size(); ++i) {
            if (decided[i] == 1) {
                completion.push_back('1');
                continue;
            }
            if (decided[i] == 0) {
                completion.push_back('0');
                continue;
            }
            const auto& ind = spec->indicators[i];
            if (side_holds(ind.on_constraints, sol.assignment)) {
                completion.push_back('1');
            } else {
                bool off_ok = true;
                for (const auto& c : ind.off_constraints) {
                    if (!holds(shifted(c, delta), sol.assignment)) {
                        off_ok = false;
                        break;
                    }
                }
                if (off_ok) {
                    completion.push_back('0');
                } else if (branch_on < 0) {
                    branch_on = static_cast<int>(i);
                    break;
                }
            }
        }

        if (branch_on < 0) {
            ++leaves;
            const bool ok = !opts->leaf_acceptor || opts->leaf_acceptor(sol.assignment);
            if (ok) {
                best_value = sol.value;
                best_argmax = sol.assignment;
                best_pattern = completion;
                have_best = true;
                return;
            }
            ++rejected;
            // The acceptor refused a boundary point the indicator semantics
            // admit; split the first open indicator and keep searching.
            branch_on = -1;
            for (size_t i = 0; i < spec->indicators.size(); ++i) {
                if (decided[i] < 0) {
                    branch_on = static_cast<int>(i);
                    break;
                }
            }
            if (branch_on < 0) return;  // fully decided and rejected: dead leaf
        }

        decided[static_cast<size_t>(branch_on)] = 1;
        explore(decided);
        decided[static_cast<size_t>(branch_on)] = 0;
        explore(decided);
        decided[static_cast<size_t>(branch_on)] = -1;
    }
};

}  // namespace

BranchResult branch_solve(const LinearProgram& lp, const BranchSpec& spec,
                          const BranchOptions& opts) {
    if (spec.delta < 0) throw std::invalid_argument("branch delta must be >= 0");
    if (spec.indicators.size() > opts.indicator_cap) {
        throw BudgetExceeded("indicator count " + std::to_string(spec.indicators.size()) +
                             " exceeds cap " + std::to_string(opts.indicator_cap) +
                             "; reduce the instance or raise the cap");
    }
    for (const auto& ind : spec.indicators) {
        for (const auto& a : ind.on_constraints) {
            for (const auto& b : ind.off_constraints) {
                if (same_constraint(a, b)) {
                    throw std::invalid_argument("indicator '" + ind.id +
                                                "' repeats a constraint on both sides");
                }
            }
        }
    }

    auto run = [&](const Rat& delta, bool with_acceptor) {
        SearchState st;
        st.base = &lp;
        st.spec = &spec;
        BranchOptions local = opts;
        if (!with_acceptor) local.leaf_acceptor = nullptr;
        st.opts = &local;
        st.delta = delta;
        std::vector<int> decided(spec.indicators.size(), -1);
        st.explore(decided);
        return st;
    };

    SearchState main = run(spec.delta, true);

    BranchResult out;
    out.nodes = main.nodes;
    out.leaves = main.leaves;
    out.rejected_leaves = main.rejected;
    out.pivots = main.pivots;
    if (main.unbounded) {
        out.status = SolveStatus::Unbounded;
        return out;
    }
    if (!main.have_best) {
        out.status = SolveStatus::Infeasible;
        if (main.have_relax) out.relaxation_bound = main.relax;
        return out;
    }
    out.status = SolveStatus::Optimal;
    out.value = main.best_value;
    out.argmax = main.best_argmax;
    out.pattern = main.best_pattern;
    if (spec.delta == 0) {
        out.relaxation_bound = main.have_relax ? main.relax : main.best_value;
    } else {
        SearchState relax = run(Rat(0), false);
        out.nodes += relax.nodes;
        out.pivots += relax.pivots;
        out.relaxation_bound = relax.have_relax ? relax.relax : out.value;
    }
    return out;
}

}  // namespace budgetmech::lp
