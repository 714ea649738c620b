#include "budgetmech/solvers.hpp"

#include "budgetmech/errors.hpp"
#include "budgetmech/model_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <stdexcept>

namespace budgetmech {

namespace {

using lp::Constraint;
using lp::LinearForm;
using lp::LinearProgram;
using lp::Relation;

// Variable layout for per-type programs: x_i at 2i, s_i at 2i+1.
struct VarIds {
    int x(size_t i) const { return static_cast<int>(2 * i); }
    int s(size_t i) const { return static_cast<int>(2 * i + 1); }
};

LinearProgram base_program(const BuyerDistribution& d) {
    LinearProgram prog;
    const VarIds ids;
    for (size_t i = 0; i < d.size(); ++i) {
        prog.add_variable("x" + std::to_string(i), /*nonneg=*/true);
        prog.add_variable("s" + std::to_string(i), /*nonneg=*/true);
    }
    LinearForm objective;
    for (size_t i = 0; i < d.size(); ++i) {
        const auto& t = d.points()[i];
        prog.add_constraint({{ids.x(i), Rat(1)}}, Relation::LessEq, Rat(1),
                            "cap" + std::to_string(i));
        prog.add_constraint({{ids.s(i), Rat(1)}, {ids.x(i), -t.v}}, Relation::LessEq, Rat(0),
                            "ir" + std::to_string(i));
        prog.add_constraint({{ids.s(i), Rat(1)}, {ids.x(i), -t.w}}, Relation::LessEq, Rat(0),
                            "bf" + std::to_string(i));
        objective.push_back({ids.s(i), t.prob});
    }
    prog.set_objective(std::move(objective));
    return prog;
}

// Truthful utility of i minus the utility of claiming j's lottery, as a
// >= 0 constraint: v_i x_i - s_i - v_i x_j + s_j >= 0.
Constraint deviation_row(const BuyerDistribution& d, size_t i, size_t j) {
    const VarIds ids;
    const Rat& vi = d.points()[i].v;
    return {{{ids.x(i), vi}, {ids.s(i), Rat(-1)}, {ids.x(j), -vi}, {ids.s(j), Rat(1)}},
            Relation::GreaterEq,
            Rat(0),
            "ic" + std::to_string(i) + "_" + std::to_string(j)};
}

Mechanism mechanism_from_assignment(const BuyerDistribution& d, const std::vector<Rat>& x) {
    const VarIds ids;
    std::vector<Lottery> lots;
    lots.reserve(d.size());
    for (size_t i = 0; i < d.size(); ++i) {
        lots.emplace_back(x[static_cast<size_t>(ids.x(i))], x[static_cast<size_t>(ids.s(i))]);
    }
    return Mechanism(d, std::move(lots));
}

void require_witness(const SolveResult& r, const BuyerDistribution& d) {
    const auto report = check_feasible(r.witness, d, r.cls);
    if (!report.feasible()) {
        throw std::logic_error("solver returned an infeasible witness for class " + r.cls.name());
    }
    if (revenue(r.witness, d) != r.value) {
        throw std::logic_error("solver witness revenue does not match the reported value");
    }
    if (r.value > r.upper_bound) {
        throw std::logic_error("solver value exceeds its upper bound");
    }
}

// Plan of deviation pairs for the full class. A pair (i, j) is
// unconditional when BF/IR already make j's lottery affordable to i
// (min(v_j, w_j) <= w_i); otherwise affordability is endogenous and the
// pair gets an indicator. The unconditional set is thinned with a chain
// argument: for types sharing one valuation, the deviation utility depends
// only on the target, so adjacent constraints in budget order imply the
// rest, and one representative per group covers each outside target.
struct PairPlan {
    std::vector<std::pair<size_t, size_t>> unconditional;
    std::vector<std::pair<size_t, size_t>> indicators;
};

PairPlan plan_full_pairs(const BuyerDistribution& d) {
    const auto& pts = d.points();
    const size_t n = pts.size();
    auto always_affordable = [&](size_t i, size_t j) {
        return std::min(pts[j].v, pts[j].w) <= pts[i].w;
    };

    std::map<Rat, std::vector<size_t>> groups;  // valuation -> indices, budget-ascending
    for (size_t i = 0; i < n; ++i) groups[pts[i].v].push_back(i);

    std::vector<std::vector<bool>> keep(n, std::vector<bool>(n, false));
    for (const auto& [v, g] : groups) {
        // adjacent members in budget order, both directions where applicable
        for (size_t s = 0; s + 1 < g.size(); ++s) {
            keep[g[s + 1]][g[s]] = true;  // downward is always affordable
            if (always_affordable(g[s], g[s + 1])) keep[g[s]][g[s + 1]] = true;
        }
        // one representative per outside target
        for (size_t j = 0; j < n; ++j) {
            if (pts[j].v == v) continue;
            for (size_t m : g) {
                if (always_affordable(m, j)) {
                    keep[m][j] = true;
                    break;
                }
            }
        }
        // upward non-adjacent pairs whose adjacent chain has a gap
        for (size_t a = 0; a < g.size(); ++a) {
            for (size_t b = a + 2; b < g.size(); ++b) {
                if (!always_affordable(g[a], g[b])) continue;
                bool chained = true;
                for (size_t s = a; s < b; ++s) {
                    if (!always_affordable(g[s], g[s + 1])) {
                        chained = false;
                        break;
                    }
                }
                if (!chained) keep[g[a]][g[b]] = true;
            }
        }
    }

    PairPlan plan;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (always_affordable(i, j)) {
                if (keep[i][j]) plan.unconditional.emplace_back(i, j);
            } else {
                plan.indicators.emplace_back(i, j);
            }
        }
    }
    return plan;
}

}  // namespace

SolveResult optimal_lp_class(const BuyerDistribution& d, const ClassSpec& cls,
                             const SolveOptions&) {
    if (cls.kind != MechanismClass::SIC && cls.kind != MechanismClass::CB) {
        throw std::invalid_argument("optimal_lp_class solves sic or cb, got " + cls.name());
    }
    d.require_valid();
    LinearProgram prog = base_program(d);
    const auto& pts = d.points();
    for (size_t i = 0; i < pts.size(); ++i) {
        for (size_t j = 0; j < pts.size(); ++j) {
            if (i == j) continue;
            if (cls.kind == MechanismClass::CB && pts[j].w > pts[i].w) continue;
            const Constraint c = deviation_row(d, i, j);
            prog.add_constraint(c.lhs, c.rel, c.rhs, c.name);
        }
    }
    const auto sol = lp::solve_lp(prog);
    if (sol.status != lp::SolveStatus::Optimal) {
        throw std::logic_error("class program must be feasible and bounded");
    }
    SolveResult r{cls, sol.value, sol.value, mechanism_from_assignment(d, sol.assignment), "", {}};
    r.diagnostics.lp_pivots = sol.pivots;
    require_witness(r, d);
    return r;
}

SolveResult optimal_full(const BuyerDistribution& d, const SolveOptions& opts) {
    d.require_valid();
    const auto& pts = d.points();
    const VarIds ids;
    LinearProgram prog = base_program(d);
    const PairPlan plan = plan_full_pairs(d);
    for (const auto& [i, j] : plan.unconditional) {
        const Constraint c = deviation_row(d, i, j);
        prog.add_constraint(c.lhs, c.rel, c.rhs, c.name);
    }

    lp::BranchSpec spec;
    spec.delta = opts.delta;
    for (const auto& [i, j] : plan.indicators) {
        lp::Indicator ind;
        ind.id = std::to_string(i) + ">" + std::to_string(j);
        // affordable: s_j <= w_i x_j, and the deviation must not pay off
        ind.on_constraints.push_back({{{ids.s(j), Rat(1)}, {ids.x(j), -pts[i].w}},
                                      Relation::LessEq,
                                      Rat(0),
                                      "aff" + ind.id});
        ind.on_constraints.push_back(deviation_row(d, i, j));
        ind.off_constraints.push_back({{{ids.s(j), Rat(1)}, {ids.x(j), -pts[i].w}},
                                       Relation::GreaterEq,
                                       Rat(0),
                                       "unaff" + ind.id});
        spec.indicators.push_back(std::move(ind));
    }

    lp::BranchOptions bopts;
    bopts.indicator_cap = opts.indicator_cap;
    bopts.node_budget = opts.node_budget;
    bopts.leaf_acceptor = [&](const std::vector<Rat>& x) {
        return check_feasible(mechanism_from_assignment(d, x), d, ClassSpec::M()).feasible();
    };
    const auto res = lp::branch_solve(prog, spec, bopts);
    if (res.status != lp::SolveStatus::Optimal) {
        throw std::logic_error("full-class solve found no certified mechanism");
    }
    SolveResult r{ClassSpec::M(), res.value, res.relaxation_bound,
                  mechanism_from_assignment(d, res.argmax), res.pattern, {}};
    r.diagnostics.lp_pivots = res.pivots;
    r.diagnostics.nodes = res.nodes;
    r.diagnostics.leaves = res.leaves;
    r.diagnostics.rejected_leaves = res.rejected_leaves;
    require_witness(r, d);
    return r;
}

SolveResult optimal_menu_limited(const BuyerDistribution& d, int m, const SolveOptions& opts) {
    d.require_valid();
    if (m < 1) throw std::invalid_argument("menu cap must be >= 1");
    const size_t n = d.size();
    if (static_cast<size_t>(m) >= n) {
        SolveResult r = optimal_full(d, opts);
        r.cls = ClassSpec::Menu(m);
        require_witness(r, d);
        return r;
    }

    const auto& pts = d.points();
    std::uint64_t count = 1;
    for (size_t i = 0; i < n; ++i) {
        count *= static_cast<std::uint64_t>(m) + 1;
        if (count > opts.assignment_cap) {
            throw BudgetExceeded("menu enumeration budget exceeded: (m+1)^n > cap");
        }
    }

    SolveResult best;
    best.cls = ClassSpec::Menu(m);
    bool have_best = false;
    Rat upper = 0;
    SolveDiagnostics diag;

    std::vector<int> sigma(n, 0);  // 0 = trivial lottery, 1..m = slot
    while (true) {
        // canonical labeling: slot labels appear in first-use order
        bool canonical = true;
        int seen = 0;
        for (size_t i = 0; i < n && canonical; ++i) {
            if (sigma[i] > seen + 1) canonical = false;
            seen = std::max(seen, sigma[i]);
        }
        if (canonical) {
            ++diag.assignments;
            const int used = seen;
            LinearProgram prog;
            std::vector<int> qv(static_cast<size_t>(used) + 1, -1);
            std::vector<int> pv(static_cast<size_t>(used) + 1, -1);
            for (int a = 1; a <= used; ++a) {
                qv[static_cast<size_t>(a)] =
                    prog.add_variable("q" + std::to_string(a), true);
                pv[static_cast<size_t>(a)] =
                    prog.add_variable("p" + std::to_string(a), true);
                prog.add_constraint({{qv[static_cast<size_t>(a)], Rat(1)}}, Relation::LessEq,
                                    Rat(1), "cap" + std::to_string(a));
            }
            LinearForm objective;
            for (size_t i = 0; i < n; ++i) {
                const int a = sigma[i];
                if (a == 0) continue;
                prog.add_constraint({{pv[static_cast<size_t>(a)], Rat(1)},
                                     {qv[static_cast<size_t>(a)], -pts[i].v}},
                                    Relation::LessEq, Rat(0), "ir" + std::to_string(i));
                prog.add_constraint({{pv[static_cast<size_t>(a)], Rat(1)},
                                     {qv[static_cast<size_t>(a)], -pts[i].w}},
                                    Relation::LessEq, Rat(0), "bf" + std::to_string(i));
                objective.push_back({pv[static_cast<size_t>(a)], pts[i].prob});
            }
            prog.set_objective(std::move(objective));

            // cheapest type sharing a slot decides when it is affordable
            std::vector<Rat> slot_min(static_cast<size_t>(used) + 1);
            for (int a = 1; a <= used; ++a) {
                bool first = true;
                for (size_t i = 0; i < n; ++i) {
                    if (sigma[i] != a) continue;
                    const Rat mn = std::min(pts[i].v, pts[i].w);
                    if (first || mn < slot_min[static_cast<size_t>(a)]) {
                        slot_min[static_cast<size_t>(a)] = mn;
                        first = false;
                    }
                }
            }

            lp::BranchSpec spec;
            spec.delta = opts.delta;
            for (size_t i = 0; i < n; ++i) {
                for (int b = 1; b <= used; ++b) {
                    if (sigma[i] == b) continue;
                    // utility of i at its own assignment minus at slot b
                    LinearForm dev;
                    if (sigma[i] != 0) {
                        dev.push_back({qv[static_cast<size_t>(sigma[i])], pts[i].v});
                        dev.push_back({pv[static_cast<size_t>(sigma[i])], Rat(-1)});
                    }
                    dev.push_back({qv[static_cast<size_t>(b)], -pts[i].v});
                    dev.push_back({pv[static_cast<size_t>(b)], Rat(1)});
                    const std::string nm = "ic" + std::to_string(i) + "_" + std::to_string(b);
                    if (slot_min[static_cast<size_t>(b)] <= pts[i].w) {
                        prog.add_constraint(dev, Relation::GreaterEq, Rat(0), nm);
                    } else {
                        lp::Indicator ind;
                        ind.id = nm;
                        ind.on_constraints.push_back({{{pv[static_cast<size_t>(b)], Rat(1)},
                                                       {qv[static_cast<size_t>(b)], -pts[i].w}},
                                                      Relation::LessEq, Rat(0), "aff" + nm});
                        ind.on_constraints.push_back({dev, Relation::GreaterEq, Rat(0), nm});
                        ind.off_constraints.push_back({{{pv[static_cast<size_t>(b)], Rat(1)},
                                                        {qv[static_cast<size_t>(b)], -pts[i].w}},
                                                       Relation::GreaterEq, Rat(0), "unaff" + nm});
                        spec.indicators.push_back(std::move(ind));
                    }
                }
            }

            auto mech_of = [&](const std::vector<Rat>& x) {
                std::vector<Lottery> lots;
                lots.reserve(n);
                for (size_t i = 0; i < n; ++i) {
                    if (sigma[i] == 0) {
                        lots.emplace_back();
                    } else {
                        lots.emplace_back(x[static_cast<size_t>(qv[static_cast<size_t>(sigma[i])])],
                                          x[static_cast<size_t>(pv[static_cast<size_t>(sigma[i])])]);
                    }
                }
                return Mechanism(d, std::move(lots));
            };

            lp::BranchOptions bopts;
            bopts.indicator_cap = opts.indicator_cap;
            bopts.node_budget = opts.node_budget;
            bopts.leaf_acceptor = [&](const std::vector<Rat>& x) {
                return check_feasible(mech_of(x), d, ClassSpec::Menu(m)).feasible();
            };
            const auto res = lp::branch_solve(prog, spec, bopts);
            diag.lp_pivots += res.pivots;
            diag.nodes += res.nodes;
            diag.leaves += res.leaves;
            diag.rejected_leaves += res.rejected_leaves;
            if (res.status == lp::SolveStatus::Optimal) {
                if (res.relaxation_bound > upper) upper = res.relaxation_bound;
                if (!have_best || res.value > best.value) {
                    best.value = res.value;
                    best.witness = mech_of(res.argmax);
                    best.pattern = res.pattern;
                    have_best = true;
                }
            }
        }

        size_t pos = 0;  // next assignment, least-significant first
        while (pos < n) {
            if (++sigma[pos] <= m) break;
            sigma[pos] = 0;
            ++pos;
        }
        if (pos == n) break;
    }

    if (!have_best) throw std::logic_error("menu enumeration found no mechanism");
    best.upper_bound = std::max(upper, best.value);
    best.diagnostics = diag;
    require_witness(best, d);
    return best;
}

SolveResult optimal_posted(const BuyerDistribution& d) {
    d.require_valid();
    std::vector<Rat> candidates;
    for (const auto& t : d.points()) {
        const Rat mn = std::min(t.v, t.w);
        if (mn > 0) candidates.push_back(mn);
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    Rat best_price = 0;
    Rat best_value = 0;
    for (const auto& price : candidates) {
        Rat mass = 0;
        for (const auto& t : d.points()) {
            if (std::min(t.v, t.w) >= price) mass += t.prob;
        }
        const Rat value = price * mass;
        if (value > best_value) {  // ties keep the lowest price
            best_value = value;
            best_price = price;
        }
    }

    std::vector<Lottery> lots;
    for (const auto& t : d.points()) {
        if (best_value > 0 && std::min(t.v, t.w) >= best_price) {
            lots.emplace_back(Rat(1), best_price);
        } else {
            lots.emplace_back();
        }
    }
    SolveResult r{ClassSpec::Posted(), best_value, best_value, Mechanism(d, std::move(lots)), "", {}};
    require_witness(r, d);
    return r;
}

nlohmann::ordered_json solve_result_to_json(const SolveResult& r) {
    nlohmann::ordered_json j;
    j["class"] = r.cls.name();
    j["value"] = rat_str(r.value);
    j["upper_bound"] = rat_str(r.upper_bound);
    j["witness"] = mechanism_to_json(r.witness, "witness");
    j["pattern"] = r.pattern;
    j["diagnostics"] = {{"lp_pivots", r.diagnostics.lp_pivots},
                        {"nodes", r.diagnostics.nodes},
                        {"leaves", r.diagnostics.leaves},
                        {"rejected_leaves", r.diagnostics.rejected_leaves},
                        {"assignments", r.diagnostics.assignments}};
    return j;
}

}  // namespace budgetmech
