#pragma once

#include "budgetmech/types.hpp"

#include <nlohmann/json_fwd.hpp>

namespace budgetmech {

/// One violated constraint. Slack is the signed residual of the constraint
/// at the offending point(s); a listed violation always has slack < 0.
struct Violation {
    std::string constraint;  // BF | IR | IC | SIC | CB | MENU | POSTED
    TypePoint deviator;
    std::optional<TypePoint> target;  // set for deviation constraints
    Rat slack;
};

struct FeasibilityReport {
    ClassSpec cls;
    std::vector<Violation> violations;
    bool feasible() const { return violations.empty(); }
};

/// Verifies a mechanism against the constraint family of the given class:
///   - M:      BF, IR, and a deviation constraint for every ordered pair
///             whose target lottery is affordable to the deviator
///             (p_target <= w_deviator * q_target; equality counts).
///   - SIC:    BF, IR, deviations for all ordered pairs.
///   - CB:     BF, IR, deviations only toward weakly lower budget types.
///   - MENU m: class-M checks plus menu size <= m.
///   - POSTED: class-M checks plus menu contained in a single {(1, p)}.
FeasibilityReport check_feasible(const Mechanism& mech, const BuyerDistribution& d,
                                 const ClassSpec& cls);

nlohmann::ordered_json feasibility_report_to_json(const FeasibilityReport& r);

enum class TieBreak { SellerFavorable, BuyerFirst };

/// Two-stage buyer choice from a menu: keep entries that are affordable and
/// individually rational (p <= q * min(v, w); the outside option (0,0) is
/// always available), then maximize expected utility v*q - p. Utility ties
/// go to the highest payment then highest q under SellerFavorable, and to
/// the lowest payment then lowest q under BuyerFirst.
Lottery best_response(const std::vector<Lottery>& menu, const TypePoint& t, TieBreak tie);

/// Utility-argmax over an explicit candidate set (no affordability filter).
Lottery pick_by_tie_break(const std::vector<Lottery>& candidates, const Rat& v, TieBreak tie);

/// Rescales every payment by (1 - eps_prime), 0 < eps_prime < 1. Revenue
/// scales by exactly the same factor, and buyer choices that used to tie
/// now strictly favor the higher payment. Each incentive margin moves by
/// eps_prime * (own payment - target payment), so full-class feasibility
/// survives whenever eps_prime is small against the mechanism's slack;
/// a large eps_prime can re-open a deviation toward an expensive entry.
Mechanism seller_favorable_scale(const Mechanism& mech, const Rat& eps_prime);

}  // namespace budgetmech
