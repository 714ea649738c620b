#pragma once

#include <stdexcept>
#include <string>

namespace budgetmech {

/// A configured size or work cap was hit (indicator count, search nodes,
/// menu assignments, oracle limits). Distinct from invalid input so
/// callers can suggest raising the cap or shrinking the instance.
struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace budgetmech
