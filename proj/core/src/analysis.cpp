#include "budgetmech/analysis.hpp"

#include "budgetmech/feasibility.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace budgetmech {

ExtendedMechanism ExtendedMechanism::from_menu(std::vector<Lottery> menu) {
    ExtendedMechanism ext;
    for (auto& l : menu) {
        if (!l.trivial()) ext.menu_.push_back(l);
    }
    std::sort(ext.menu_.begin(), ext.menu_.end());
    return ext;
}

ExtendedMechanism ExtendedMechanism::from_mechanism(const Mechanism& mech) {
    ExtendedMechanism ext = from_menu(menu_of(mech));
    ext.support_ = mech.entries();
    return ext;
}

Lottery ExtendedMechanism::menu_choice(const Rat& v, const Rat& w) const {
    std::vector<Lottery> affordable;
    affordable.reserve(menu_.size() + 1);
    affordable.emplace_back();  // outside option
    for (const auto& l : menu_) {
        if (l.p() <= w * l.q()) affordable.push_back(l);
    }
    return pick_by_tie_break(affordable, v, TieBreak::SellerFavorable);
}

Lottery ExtendedMechanism::query(const Rat& v, const Rat& w) const {
    for (const auto& [t, l] : support_) {
        if (t.v == v && t.w == w) return l;
    }
    return menu_choice(v, w);
}

Lottery extend_query(const ExtendedMechanism& ext, const Rat& v, const Rat& w) {
    if (v < 0 || w < 0) throw std::invalid_argument("extension query needs v, w >= 0");
    return ext.query(v, w);
}

PaymentMonotoneReport check_payment_monotone(const ExtendedMechanism& ext,
                                             const std::vector<std::pair<Rat, Rat>>& grid) {
    std::vector<Rat> payments;
    payments.reserve(grid.size());
    for (const auto& [v, w] : grid) {
        payments.push_back(ext.query(v, w).p());
    }
    PaymentMonotoneReport report;
    for (size_t a = 0; a < grid.size(); ++a) {
        for (size_t b = 0; b < grid.size(); ++b) {
            if (a == b) continue;
            if (grid[a].first <= grid[b].first && grid[a].second <= grid[b].second &&
                payments[a] > payments[b]) {
                report.violations.push_back({grid[a], grid[b], payments[a], payments[b]});
            }
        }
    }
    return report;
}

AgreementReport extension_agreement(const Mechanism& mech) {
    const auto ext = ExtendedMechanism::from_mechanism(mech);
    AgreementReport report;
    for (const auto& [t, assigned] : mech.entries()) {
        const Lottery chosen = ext.menu_choice(t.v, t.w);
        if (chosen.utility(t.v) != assigned.utility(t.v) || chosen.p() != assigned.p()) {
            report.mismatches.push_back({t, assigned, chosen});
        }
    }
    return report;
}

std::string ValueSource::label() const {
    return kind == Kind::Witness ? "witness" : cls.name();
}

ValueSource ValueSource::parse(const std::string& text) {
    if (text == "witness") return FromWitness();
    return FromClass(ClassSpec::parse(text));
}

std::string trend_str(Trend t) {
    switch (t) {
        case Trend::Decreasing: return "decreasing";
        case Trend::Increasing: return "increasing";
        case Trend::Flat: return "flat";
        case Trend::Mixed: return "mixed";
    }
    return "?";
}

SolveResult solve_class(const BuyerDistribution& d, const ClassSpec& cls,
                        const SolveOptions& opts) {
    switch (cls.kind) {
        case MechanismClass::M: return optimal_full(d, opts);
        case MechanismClass::SIC:
        case MechanismClass::CB: return optimal_lp_class(d, cls, opts);
        case MechanismClass::MENU: return optimal_menu_limited(d, cls.menu_cap.value(), opts);
        case MechanismClass::POSTED: return optimal_posted(d);
    }
    throw std::logic_error("unreachable class");
}

namespace {

FamilyParams with_param(const FamilyParams& base, const Rat& value) {
    FamilyParams p = base;
    switch (base.name) {
        case FamilyName::Prop3:
        case FamilyName::Prop4:
        case FamilyName::Prop7:
        case FamilyName::Prop8Pair: {
            if (denominator(value) != 1) throw std::invalid_argument("k must be an integer");
            p.k = static_cast<int>(numerator(value).convert_to<long>());
            break;
        }
        case FamilyName::Lemma4Trunc:
        case FamilyName::Lemma5Trunc: {
            if (denominator(value) != 1) throw std::invalid_argument("n must be an integer");
            p.n = static_cast<int>(numerator(value).convert_to<long>());
            break;
        }
        case FamilyName::Prop9:
        case FamilyName::Prop10:
            p.B = value;
            break;
        case FamilyName::Prop11Pair:
            p.H = value;
            break;
    }
    return p;
}

Rat side_value(const FamilyParams& params, const BuyerDistribution& d, const ValueSource& src,
               const SolveOptions& opts) {
    if (src.kind == ValueSource::Kind::Witness) {
        return revenue(witness_mechanism(params), d);
    }
    return solve_class(d, src.cls, opts).value;
}

}  // namespace

GapReport gap_sweep(const FamilyParams& base, const std::vector<Rat>& params,
                    const ValueSource& numerator, const ValueSource& denominator,
                    const SolveOptions& opts) {
    GapReport report;
    report.family = family_name_str(base.name);
    report.numerator_label = numerator.label();
    report.denominator_label = denominator.label();

    for (const auto& value : params) {
        GapRow row;
        row.param = rat_str(value);
        try {
            const FamilyParams point = with_param(base, value);
            const FamilyResult fam = make_family(point);
            const BuyerDistribution& num_d = fam.distribution;
            const BuyerDistribution& den_d = fam.partner ? *fam.partner : fam.distribution;
            row.numerator = side_value(point, num_d, numerator, opts);
            row.denominator = side_value(point, den_d, denominator, opts);
            if (row.denominator == 0) throw std::domain_error("denominator revenue is zero");
            row.ratio = row.numerator / row.denominator;
        } catch (const std::exception& e) {
            row.failed = true;
            row.note = e.what();
        }
        report.rows.push_back(std::move(row));
    }

    bool non_increasing = true, non_decreasing = true, any_pair = false;
    const GapRow* prev = nullptr;
    for (const auto& row : report.rows) {
        if (row.failed) continue;
        if (prev) {
            any_pair = true;
            if (row.ratio > prev->ratio) non_increasing = false;
            if (row.ratio < prev->ratio) non_decreasing = false;
        }
        prev = &row;
    }
    if (!any_pair || (non_increasing && non_decreasing)) {
        report.trend = Trend::Flat;
    } else if (non_increasing) {
        report.trend = Trend::Decreasing;
    } else if (non_decreasing) {
        report.trend = Trend::Increasing;
    } else {
        report.trend = Trend::Mixed;
    }
    return report;
}

std::string gap_report_csv(const GapReport& report) {
    std::string out = "param,numerator,denominator,ratio_decimal,ratio_fraction\n";
    for (const auto& row : report.rows) {
        if (row.failed) {
            out += row.param + ",,,,FAILED: " + row.note + "\n";
            continue;
        }
        out += row.param + "," + rat_str(row.numerator) + "," + rat_str(row.denominator) + "," +
               rat_decimal(row.ratio) + "," + rat_str(row.ratio) + "\n";
    }
    return out;
}

nlohmann::ordered_json gap_report_json(const GapReport& report) {
    nlohmann::ordered_json j;
    j["family"] = report.family;
    j["numerator"] = report.numerator_label;
    j["denominator"] = report.denominator_label;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : report.rows) {
        nlohmann::ordered_json r;
        r["param"] = row.param;
        if (row.failed) {
            r["failed"] = true;
            r["note"] = row.note;
        } else {
            r["numerator"] = rat_str(row.numerator);
            r["denominator"] = rat_str(row.denominator);
            r["ratio"] = rat_str(row.ratio);
            r["ratio_decimal"] = rat_decimal(row.ratio);
        }
        j["rows"].push_back(r);
    }
    j["trend"] = trend_str(report.trend);
    return j;
}

namespace {

// Mass-preserving coupling feasibility via Edmonds-Karp on the bipartite
// dominance graph; supplies are the base masses, demands the partner's.
bool coupling_exists(const BuyerDistribution& first, const BuyerDistribution& second) {
    const size_t n = first.size(), m = second.size();
    const size_t S = n + m, T = n + m + 1, V = n + m + 2;
    std::vector<std::vector<Rat>> cap(V, std::vector<Rat>(V, Rat(0)));
    for (size_t i = 0; i < n; ++i) cap[S][i] = first.points()[i].prob;
    for (size_t j = 0; j < m; ++j) cap[n + j][T] = second.points()[j].prob;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < m; ++j) {
            if (second.points()[j].v >= first.points()[i].v &&
                second.points()[j].w >= first.points()[i].w) {
                cap[i][n + j] = 2;  // effectively unbounded
            }
        }
    }
    Rat flow = 0;
    while (true) {
        std::vector<int> parent(V, -1);
        parent[S] = static_cast<int>(S);
        std::deque<size_t> queue{S};
        while (!queue.empty() && parent[T] < 0) {
            const size_t u = queue.front();
            queue.pop_front();
            for (size_t v = 0; v < V; ++v) {
                if (parent[v] < 0 && cap[u][v] > 0) {
                    parent[v] = static_cast<int>(u);
                    queue.push_back(v);
                }
            }
        }
        if (parent[T] < 0) break;
        Rat push = cap[static_cast<size_t>(parent[T])][T];
        for (size_t v = T; v != S; v = static_cast<size_t>(parent[v])) {
            push = std::min(push, cap[static_cast<size_t>(parent[v])][v]);
        }
        for (size_t v = T; v != S; v = static_cast<size_t>(parent[v])) {
            const size_t u = static_cast<size_t>(parent[v]);
            cap[u][v] -= push;
            cap[v][u] += push;
        }
        flow += push;
    }
    return flow == 1;
}

}  // namespace

std::optional<std::string> dominance_violation(const BuyerDistribution& first,
                                               const BuyerDistribution& second) {
    first.require_valid();
    second.require_valid();
    if (coupling_exists(first, second)) return std::nullopt;
    // Name a witness point: one whose dominating candidates carry too
    // little mass.
    for (const auto& t : first.points()) {
        Rat covering = 0;
        for (const auto& u : second.points()) {
            if (u.v >= t.v && u.w >= t.w) covering += u.prob;
        }
        if (covering < t.prob) {
            return "no dominating mass for " + point_str(t) + ": candidates carry " +
                   rat_str(covering) + " < " + rat_str(t.prob);
        }
    }
    return "no mass-preserving dominance coupling exists";
}

Rat nonmono_gap(const BuyerDistribution& first, const BuyerDistribution& second,
                const ClassSpec& cls, const SolveOptions& opts) {
    if (const auto bad = dominance_violation(first, second)) {
        throw std::invalid_argument("dominance precondition fails: " + *bad);
    }
    const Rat top = solve_class(first, cls, opts).value;
    const Rat bottom = solve_class(second, cls, opts).value;
    if (bottom == 0) throw std::domain_error("dominating distribution earns zero revenue");
    return top / bottom;
}

}  // namespace budgetmech
