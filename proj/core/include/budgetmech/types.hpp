#pragma once

#include "budgetmech/rational.hpp"

#include <compare>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace budgetmech {

/// One support point of a buyer distribution: valuation v, hard budget w,
/// probability mass prob. Identity is the (v, w) pair; mass is payload.
struct TypePoint {
    Rat v;
    Rat w;
    Rat prob;

    friend bool operator==(const TypePoint& a, const TypePoint& b) {
        return a.v == b.v && a.w == b.w;
    }
};

/// Canonical support order: lexicographic by (w, v). Keeps every
/// enumeration-based solver deterministic.
inline bool canonical_less(const TypePoint& a, const TypePoint& b) {
    if (a.w != b.w) return a.w < b.w;
    return a.v < b.v;
}

std::string point_str(const TypePoint& t);

/// A menu entry: win probability q and expected payment p. The actual
/// price charged on a win is p/q; a lottery that never allocates cannot
/// charge anything, so q = 0 forces p = 0.
class Lottery {
public:
    Lottery() : q_(0), p_(0) {}
    Lottery(Rat q, Rat p);

    const Rat& q() const { return q_; }
    const Rat& p() const { return p_; }
    bool trivial() const { return q_ == 0; }

    /// Buyer utility v*q - p at valuation v.
    Rat utility(const Rat& v) const { return v * q_ - p_; }

    friend bool operator==(const Lottery& a, const Lottery& b) {
        return a.q_ == b.q_ && a.p_ == b.p_;
    }
    friend bool operator<(const Lottery& a, const Lottery& b) {
        if (a.q_ != b.q_) return a.q_ < b.q_;
        return a.p_ < b.p_;
    }

private:
    Rat q_;
    Rat p_;
};

std::string lottery_str(const Lottery& l);

/// Finite-support buyer distribution. Construction sorts the support into
/// canonical order but does not validate; run validate_distribution to get
/// a diagnostic report, or require_valid() to throw on the first problem.
class BuyerDistribution {
public:
    BuyerDistribution() = default;
    BuyerDistribution(std::vector<TypePoint> points, std::string label);

    const std::vector<TypePoint>& points() const { return points_; }
    const std::string& label() const { return label_; }
    size_t size() const { return points_.size(); }

    std::optional<size_t> index_of(const Rat& v, const Rat& w) const;
    void require_valid() const;

private:
    std::vector<TypePoint> points_;
    std::string label_;
};

struct ValidationIssue {
    std::string message;
};

/// Reports every violated distribution invariant; empty iff valid.
std::vector<ValidationIssue> validate_distribution(const BuyerDistribution& d);

/// Direct mechanism on a finite support: one lottery per support point.
class Mechanism {
public:
    Mechanism() = default;

    /// Assignment aligned with d.points() (canonical order).
    Mechanism(const BuyerDistribution& d, std::vector<Lottery> assignment);

    /// Explicit (type, lottery) table; sorted into canonical order.
    explicit Mechanism(std::vector<std::pair<TypePoint, Lottery>> entries);

    const std::vector<std::pair<TypePoint, Lottery>>& entries() const { return entries_; }
    size_t size() const { return entries_.size(); }

    const Lottery* find(const Rat& v, const Rat& w) const;

    /// Lottery assigned to the given support point; throws naming the
    /// point when no assignment exists.
    const Lottery& assigned(const TypePoint& t) const;

private:
    std::vector<std::pair<TypePoint, Lottery>> entries_;
};

enum class MechanismClass { M, SIC, CB, MENU, POSTED };

/// Which constraint family governs feasibility and optimization.
struct ClassSpec {
    MechanismClass kind = MechanismClass::M;
    std::optional<int> menu_cap;  // required iff kind == MENU

    static ClassSpec M() { return {MechanismClass::M, std::nullopt}; }
    static ClassSpec SIC() { return {MechanismClass::SIC, std::nullopt}; }
    static ClassSpec CB() { return {MechanismClass::CB, std::nullopt}; }
    static ClassSpec Menu(int cap);
    static ClassSpec Posted() { return {MechanismClass::POSTED, std::nullopt}; }

    std::string name() const;
    static ClassSpec parse(const std::string& text);
};

/// Expected payment sum(prob_i * p_i), exact. Throws if some support point
/// of d has no assigned lottery.
Rat revenue(const Mechanism& mech, const BuyerDistribution& d);

/// Deduplicated image of the assignment with the trivial lottery removed.
/// Its size is the mechanism's menu size.
std::vector<Lottery> menu_of(const Mechanism& mech);

/// Distribution of Z = min(V, W); equal minima are merged.
std::vector<std::pair<Rat, Rat>> min_rv(const BuyerDistribution& d);

/// E[min(V, W)] — an upper bound on any feasible mechanism's revenue.
Rat expected_min(const BuyerDistribution& d);

/// Same support scaled coordinate-wise by c > 0; masses unchanged.
BuyerDistribution scale_distribution(const BuyerDistribution& d, const Rat& c);

}  // namespace budgetmech
