#pragma once

#include "budgetmech/families.hpp"
#include "budgetmech/solvers.hpp"
#include "budgetmech/types.hpp"

#include <nlohmann/json_fwd.hpp>

namespace budgetmech {

/// A finite mechanism extended to all of R+^2 through its menu: a query
/// type picks the utility-best affordable entry (p <= w q; the outside
/// option is always available), ties broken seller-favorably. When built
/// from a mechanism, the original support keeps its recorded assignment —
/// an extension coincides with the mechanism it extends on its own domain.
class ExtendedMechanism {
public:
    static ExtendedMechanism from_menu(std::vector<Lottery> menu);
    static ExtendedMechanism from_mechanism(const Mechanism& mech);

    const std::vector<Lottery>& base_menu() const { return menu_; }

    /// Menu-closure best response, ignoring any recorded support table.
    Lottery menu_choice(const Rat& v, const Rat& w) const;

    /// Recorded assignment on support points, menu_choice elsewhere.
    Lottery query(const Rat& v, const Rat& w) const;

private:
    std::vector<Lottery> menu_;
    std::vector<std::pair<TypePoint, Lottery>> support_;
};

Lottery extend_query(const ExtendedMechanism& ext, const Rat& v, const Rat& w);

struct PaymentViolation {
    std::pair<Rat, Rat> low;   // (v, w), componentwise below high
    std::pair<Rat, Rat> high;
    Rat low_payment;
    Rat high_payment;
};

struct PaymentMonotoneReport {
    std::vector<PaymentViolation> violations;
    bool monotone() const { return violations.empty(); }
};

/// Asserts payment(extend_query) is weakly increasing along every
/// componentwise-comparable pair of grid points. Mechanisms feasible in
/// the full class never violate this; relaxation-only mechanisms can.
PaymentMonotoneReport check_payment_monotone(const ExtendedMechanism& ext,
                                             const std::vector<std::pair<Rat, Rat>>& grid);

struct AgreementMismatch {
    TypePoint point;
    Lottery assigned;
    Lottery chosen;
};

struct AgreementReport {
    std::vector<AgreementMismatch> mismatches;
    bool agrees() const { return mismatches.empty(); }
};

/// Checks that the menu-closure best response reproduces each support
/// point's utility and payment — the extension property a feasible
/// mechanism must have, and a relaxation-only mechanism typically lacks.
AgreementReport extension_agreement(const Mechanism& mech);

/// Where a sweep side takes its revenue number from: a class optimum, or
/// the family's constructed witness.
struct ValueSource {
    enum class Kind { Class, Witness };
    Kind kind = Kind::Class;
    ClassSpec cls;

    static ValueSource FromClass(const ClassSpec& c) { return {Kind::Class, c}; }
    static ValueSource FromWitness() { return {Kind::Witness, ClassSpec::M()}; }
    std::string label() const;
    static ValueSource parse(const std::string& text);
};

enum class Trend { Decreasing, Increasing, Flat, Mixed };
std::string trend_str(Trend t);

struct GapRow {
    std::string param;
    Rat numerator;
    Rat denominator;
    Rat ratio;
    bool failed = false;
    std::string note;
};

struct GapReport {
    std::string family;
    std::string numerator_label;
    std::string denominator_label;
    std::vector<GapRow> rows;
    Trend trend = Trend::Flat;
};

/// Evaluates both sides at every parameter value (k, B or H slot of the
/// family, as appropriate) and reports exact ratios plus the observed
/// trend of the ratio sequence. A solver failure at one grid point flags
/// that row and leaves the rest of the report intact. For pair families
/// the numerator is evaluated on the base distribution and the
/// denominator on its dominating partner.
GapReport gap_sweep(const FamilyParams& base, const std::vector<Rat>& params,
                    const ValueSource& numerator, const ValueSource& denominator,
                    const SolveOptions& opts = {});

std::string gap_report_csv(const GapReport& report);
nlohmann::ordered_json gap_report_json(const GapReport& report);

/// Error message when no mass-preserving coupling maps `first` below
/// `second` componentwise; nullopt when `second` dominates `first`.
std::optional<std::string> dominance_violation(const BuyerDistribution& first,
                                               const BuyerDistribution& second);

/// Rev(first | class) / Rev(second | class), requiring that `second`
/// first-order stochastically dominates `first`.
Rat nonmono_gap(const BuyerDistribution& first, const BuyerDistribution& second,
                const ClassSpec& cls, const SolveOptions& opts = {});

/// Class optimum dispatcher used by sweeps and the CLI.
SolveResult solve_class(const BuyerDistribution& d, const ClassSpec& cls,
                        const SolveOptions& opts = {});

}  // namespace budgetmech
