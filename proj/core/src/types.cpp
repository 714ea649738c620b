#include "budgetmech/types.hpp"

#include <algorithm>
#include <set>

namespace budgetmech {

std::string point_str(const TypePoint& t) {
    return "(v=" + rat_str(t.v) + ", w=" + rat_str(t.w) + ")";
}

Lottery::Lottery(Rat q, Rat p) : q_(std::move(q)), p_(std::move(p)) {
    if (q_ < 0 || q_ > 1) {
        throw std::invalid_argument("lottery: q = " + rat_str(q_) + " outside [0, 1]");
    }
    if (p_ < 0) {
        throw std::invalid_argument("lottery: negative payment " + rat_str(p_));
    }
    if (q_ == 0 && p_ != 0) {
        throw std::invalid_argument("lottery: q = 0 requires p = 0, got p = " + rat_str(p_));
    }
}

std::string lottery_str(const Lottery& l) {
    return "(q=" + rat_str(l.q()) + ", p=" + rat_str(l.p()) + ")";
}

BuyerDistribution::BuyerDistribution(std::vector<TypePoint> points, std::string label)
    : points_(std::move(points)), label_(std::move(label)) {
    std::sort(points_.begin(), points_.end(), canonical_less);
}

std::optional<size_t> BuyerDistribution::index_of(const Rat& v, const Rat& w) const {
    for (size_t i = 0; i < points_.size(); ++i) {
        if (points_[i].v == v && points_[i].w == w) return i;
    }
    return std::nullopt;
}

void BuyerDistribution::require_valid() const {
    auto issues = validate_distribution(*this);
    if (!issues.empty()) {
        throw std::invalid_argument("invalid distribution '" + label_ + "': " + issues.front().message);
    }
}

std::vector<ValidationIssue> validate_distribution(const BuyerDistribution& d) {
    std::vector<ValidationIssue> issues;
    if (d.points().empty()) {
        issues.push_back({"support is empty"});
        return issues;
    }
    Rat mass = 0;
    for (const auto& t : d.points()) {
        if (t.v < 0) issues.push_back({"negative valuation at " + point_str(t)});
        if (t.w < 0) issues.push_back({"negative budget at " + point_str(t)});
        if (t.prob <= 0 || t.prob > 1) {
            issues.push_back({"mass " + rat_str(t.prob) + " outside (0, 1] at " + point_str(t)});
        }
        mass += t.prob;
    }
    for (size_t i = 0; i + 1 < d.points().size(); ++i) {
        if (d.points()[i] == d.points()[i + 1]) {
            issues.push_back({"duplicate support point " + point_str(d.points()[i])});
        }
    }
    if (mass != 1) {
        issues.push_back({"mass sums to " + rat_str(mass)});
    }
    return issues;
}

Mechanism::Mechanism(const BuyerDistribution& d, std::vector<Lottery> assignment) {
    if (assignment.size() != d.size()) {
        throw std::invalid_argument("mechanism: assignment size " + std::to_string(assignment.size()) +
                                    " does not match support size " + std::to_string(d.size()));
    }
    entries_.reserve(d.size());
    for (size_t i = 0; i < d.size(); ++i) {
        entries_.emplace_back(d.points()[i], assignment[i]);
    }
}

Mechanism::Mechanism(std::vector<std::pair<TypePoint, Lottery>> entries)
    : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& a, const auto& b) { return canonical_less(a.first, b.first); });
}

const Lottery* Mechanism::find(const Rat& v, const Rat& w) const {
    for (const auto& [t, l] : entries_) {
        if (t.v == v && t.w == w) return &l;
    }
    return nullptr;
}

const Lottery& Mechanism::assigned(const TypePoint& t) const {
    const Lottery* l = find(t.v, t.w);
    if (!l) {
        throw std::invalid_argument("mechanism: no lottery assigned to " + point_str(t));
    }
    return *l;
}

ClassSpec ClassSpec::Menu(int cap) {
    if (cap < 1) throw std::invalid_argument("menu cap must be >= 1");
    return {MechanismClass::MENU, cap};
}

std::string ClassSpec::name() const {
    switch (kind) {
        case MechanismClass::M: return "m";
        case MechanismClass::SIC: return "sic";
        case MechanismClass::CB: return "cb";
        case MechanismClass::MENU: return "menu:" + std::to_string(menu_cap.value_or(0));
        case MechanismClass::POSTED: return "posted";
    }
    return "?";
}

ClassSpec ClassSpec::parse(const std::string& text) {
    if (text == "m") return M();
    if (text == "sic") return SIC();
    if (text == "cb") return CB();
    if (text == "posted") return Posted();
    if (text.rfind("menu:", 0) == 0) return Menu(std::stoi(text.substr(5)));
    if (text == "menu") throw std::invalid_argument("class 'menu' needs a cap, e.g. menu:2");
    throw std::invalid_argument("unknown mechanism class '" + text + "'");
}

Rat revenue(const Mechanism& mech, const BuyerDistribution& d) {
    Rat total = 0;
    for (const auto& t : d.points()) {
        total += t.prob * mech.assigned(t).p();
    }
    return total;
}

std::vector<Lottery> menu_of(const Mechanism& mech) {
    std::set<Lottery> seen;
    for (const auto& [t, l] : mech.entries()) {
        if (!l.trivial()) seen.insert(l);
    }
    return {seen.begin(), seen.end()};
}

std::vector<std::pair<Rat, Rat>> min_rv(const BuyerDistribution& d) {
    std::map<Rat, Rat> acc;
    for (const auto& t : d.points()) {
        acc[std::min(t.v, t.w)] += t.prob;
    }
    return {acc.begin(), acc.end()};
}

Rat expected_min(const BuyerDistribution& d) {
    Rat total = 0;
    for (const auto& [z, mass] : min_rv(d)) total += z * mass;
    return total;
}

BuyerDistribution scale_distribution(const BuyerDistribution& d, const Rat& c) {
    if (c <= 0) throw std::invalid_argument("scale factor must be positive");
    std::vector<TypePoint> pts;
    pts.reserve(d.size());
    for (const auto& t : d.points()) {
        pts.push_back({t.v * c, t.w * c, t.prob});
    }
    return BuyerDistribution(std::move(pts), d.label() + " x" + rat_str(c));
}

}  // namespace budgetmech
