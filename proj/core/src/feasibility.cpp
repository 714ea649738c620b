#include "budgetmech/feasibility.hpp"

#include <nlohmann/json.hpp>

namespace budgetmech {

namespace {

void check_deviations(const Mechanism& mech, const BuyerDistribution& d,
                      MechanismClass kind, std::vector<Violation>& out) {
    const auto& pts = d.points();
    for (size_t i = 0; i < pts.size(); ++i) {
        const Lottery& own = mech.assigned(pts[i]);
        const Rat truthful = own.utility(pts[i].v);
        for (size_t j = 0; j < pts.size(); ++j) {
            if (i == j) continue;
            const Lottery& tgt = mech.assigned(pts[j]);
            const char* tag = "SIC";
            switch (kind) {
                case MechanismClass::SIC:
                    break;
                case MechanismClass::CB:
                    if (pts[j].w > pts[i].w) continue;
                    tag = "CB";
                    break;
                default:
                    // class M: the deviation binds only when the target
                    // lottery is ex-post affordable to the deviator.
                    if (tgt.p() > pts[i].w * tgt.q()) continue;
                    tag = "IC";
                    break;
            }
            const Rat slack = truthful - tgt.utility(pts[i].v);
            if (slack < 0) {
                out.push_back({tag, pts[i], pts[j], slack});
            }
        }
    }
}

}  // namespace

FeasibilityReport check_feasible(const Mechanism& mech, const BuyerDistribution& d,
                                 const ClassSpec& cls) {
    FeasibilityReport report{cls, {}};
    for (const auto& t : d.points()) {
        const Lottery& l = mech.assigned(t);
        const Rat bf = t.w * l.q() - l.p();
        if (bf < 0) report.violations.push_back({"BF", t, std::nullopt, bf});
        const Rat ir = t.v * l.q() - l.p();
        if (ir < 0) report.violations.push_back({"IR", t, std::nullopt, ir});
    }

    const MechanismClass deviation_kind =
        (cls.kind == MechanismClass::MENU || cls.kind == MechanismClass::POSTED)
            ? MechanismClass::M
            : cls.kind;
    check_deviations(mech, d, deviation_kind, report.violations);

    if (cls.kind == MechanismClass::MENU) {
        const auto menu = menu_of(mech);
        const int cap = cls.menu_cap.value();
        if (static_cast<int>(menu.size()) > cap) {
            report.violations.push_back(
                {"MENU", d.points().front(), std::nullopt, Rat(cap) - Rat(menu.size())});
        }
    }
    if (cls.kind == MechanismClass::POSTED) {
        const auto menu = menu_of(mech);
        if (menu.size() > 1) {
            report.violations.push_back(
                {"POSTED", d.points().front(), std::nullopt, Rat(1) - Rat(menu.size())});
        }
        for (const auto& entry : menu) {
            if (entry.q() != 1) {
                report.violations.push_back(
                    {"POSTED", d.points().front(), std::nullopt, entry.q() - 1});
            }
        }
    }
    return report;
}

nlohmann::ordered_json feasibility_report_to_json(const FeasibilityReport& r) {
    nlohmann::ordered_json j;
    j["class"] = r.cls.name();
    j["feasible"] = r.feasible();
    j["violations"] = nlohmann::ordered_json::array();
    for (const auto& v : r.violations) {
        nlohmann::ordered_json row;
        row["constraint"] = v.constraint;
        row["v"] = rat_str(v.deviator.v);
        row["w"] = rat_str(v.deviator.w);
        if (v.target) {
            row["target_v"] = rat_str(v.target->v);
            row["target_w"] = rat_str(v.target->w);
        }
        row["slack"] = rat_str(v.slack);
        j["violations"].push_back(row);
    }
    return j;
}

Lottery pick_by_tie_break(const std::vector<Lottery>& candidates, const Rat& v, TieBreak tie) {
    Lottery best;  // outside option
    Rat best_u = 0;
    bool have = false;
    for (const auto& l : candidates) {
        const Rat u = l.utility(v);
        bool better;
        if (!have) {
            better = true;
        } else if (u != best_u) {
            better = u > best_u;
        } else if (tie == TieBreak::SellerFavorable) {
            better = l.p() > best.p() || (l.p() == best.p() && l.q() > best.q());
        } else {
            better = l.p() < best.p() || (l.p() == best.p() && l.q() < best.q());
        }
        if (better) {
            best = l;
            best_u = u;
            have = true;
        }
    }
    return best;
}

Lottery best_response(const std::vector<Lottery>& menu, const TypePoint& t, TieBreak tie) {
    const Rat cap = std::min(t.v, t.w);
    std::vector<Lottery> shortlist;
    shortlist.reserve(menu.size() + 1);
    shortlist.emplace_back();  // outside option (0, 0)
    for (const auto& l : menu) {
        if (l.p() <= cap * l.q()) shortlist.push_back(l);
    }
    return pick_by_tie_break(shortlist, t.v, tie);
}

Mechanism seller_favorable_scale(const Mechanism& mech, const Rat& eps_prime) {
    if (eps_prime <= 0 || eps_prime >= 1) {
        throw std::invalid_argument("seller_favorable_scale: eps' = " + rat_str(eps_prime) +
                                    " outside (0, 1)");
    }
    std::vector<std::pair<TypePoint, Lottery>> entries;
    entries.reserve(mech.size());
    for (const auto& [t, l] : mech.entries()) {
        entries.emplace_back(t, Lottery(l.q(), (1 - eps_prime) * l.p()));
    }
    return Mechanism(std::move(entries));
}

}  // namespace budgetmech
