#pragma once

#include "budgetmech/types.hpp"

#include <optional>

namespace budgetmech {

/// Parameterized instance generators. Each family reproduces a concrete
/// construction from the budget-screening literature this library studies:
///   - prop3:        public valuation B^(k+1), k geometric budget levels B^i
///   - prop4:        prop3 squeezed into the unit square (valuation 1,
///                   budgets B^i / B^B)
///   - lemma4_trunc: correlated unbounded-revenue support (2^(2i), 2^i),
///                   masses 2^-i, truncated to n points and renormalized
///   - lemma5_trunc: independent product version of lemma4 with marginal
///                   masses proportional to sqrt(2)^-i, truncated at n
///   - prop7:        negatively correlated (1/i, 1 + i/k), uniform masses
///   - prop8_pair:   prop7 next to its budget-2 dominating counterpart
///   - prop9:        two types (B+eps, B) and (B+2eps, 1)
///   - prop10:       prop9 scaled into the unit square by 1/(B+2eps)
///   - prop11_pair:  (H,1)/(H,H) next to the (H+eps,1)/(H,H) dominator
enum class FamilyName {
    Prop3,
    Prop4,
    Lemma4Trunc,
    Lemma5Trunc,
    Prop7,
    Prop8Pair,
    Prop9,
    Prop10,
    Prop11Pair,
};

std::string family_name_str(FamilyName name);
FamilyName parse_family_name(const std::string& text);

struct FamilyParams {
    FamilyName name = FamilyName::Prop7;
    std::optional<int> k;          // prop3/prop4/prop7/prop8_pair
    std::optional<int> n;          // truncation length, lemma4/lemma5
    std::optional<Rat> B;          // prop9/prop10
    std::optional<Rat> H;          // prop11_pair
    std::optional<Rat> eps;        // prop9/prop10/prop11_pair
    std::optional<int> precision;  // lemma5 mass approximation digits (default 30)
};

struct FamilyResult {
    BuyerDistribution distribution;
    /// Dominating counterpart, present for the pair families; it
    /// first-order stochastically dominates `distribution` componentwise.
    std::optional<BuyerDistribution> partner;
    /// Probability mass cut off by truncating an infinite support.
    std::optional<Rat> tail_mass;
    /// Bound on the total mass error of the lemma5 irrational-mass
    /// approximation, at the requested precision.
    std::optional<Rat> approx_residual;
};

FamilyResult make_family(const FamilyParams& params);

/// The explicitly constructed mechanism accompanying a family, on the
/// family's support. Feasible in the full class for prop3/prop4/lemma4/
/// lemma5; the prop7 witness needs the cash-bond relaxation.
Mechanism witness_mechanism(const FamilyParams& params);

/// Rescales the support to [1, H/L]^2 (dividing by L), rounds every
/// coordinate down to the nearest power of (1+eps), and merges collapsed
/// types. The result has at most (1 + floor(log_{1+eps}(H/L)))^2 types and
/// every rounded coordinate lies within a (1+eps) factor of the original.
BuyerDistribution round_down(const BuyerDistribution& d, const Rat& eps, const Rat& L,
                             const Rat& H);

/// The (1 + floor(log_{1+eps}(H/L)))^2 type-count bound after round_down.
long round_down_type_bound(const Rat& eps, const Rat& L, const Rat& H);

/// Closed-form optimal menu for a buyer with public valuation v_hat > 1
/// and private budget on [0, 1]: below the critical budget w_c the seller
/// extracts the whole budget at allocation (v_hat - w_c)/(v_hat - w);
/// above it everyone gets the item at price w_c.
struct Example1Params {
    Rat v_hat;
    Rat w_c;
};

Lottery example1_query(const Example1Params& params, const Rat& w);

/// Expected revenue of the closed-form menu at critical budget c, for a
/// uniform budget on [0, 1].
double example1_revenue(double v_hat, double c);

struct Example1Optimum {
    double w_c = 0;
    double revenue = 0;
};

/// One-dimensional golden-section maximization of example1_revenue over
/// c in (0, 1), to the given tolerance on c.
Example1Optimum example1_optimal_wc(const Rat& v_hat, double tolerance = 1e-6);

/// Uniform[0,1] budget discretized to n left-endpoint atoms {0, 1/n, ...,
/// (n-1)/n} with the public valuation v_hat; refining n to 2n moves every
/// atom weakly up, so exact solves increase with resolution.
BuyerDistribution example1_discretized(const Rat& v_hat, int n);

}  // namespace budgetmech
