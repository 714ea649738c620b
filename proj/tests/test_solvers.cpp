#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "budgetmech/errors.hpp"
#include "budgetmech/families.hpp"
#include "budgetmech/solvers.hpp"

#include <random>

using namespace budgetmech;

namespace {

BuyerDistribution single(const Rat& v, const Rat& w) {
    return BuyerDistribution({{v, w, Rat(1)}}, "single");
}

FamilyParams prop9_params(const Rat& B, const Rat& eps) {
    FamilyParams p;
    p.name = FamilyName::Prop9;
    p.B = B;
    p.eps = eps;
    return p;
}

FamilyParams prop7_params(int k) {
    FamilyParams p;
    p.name = FamilyName::Prop7;
    p.k = k;
    return p;
}

BuyerDistribution random_distribution(std::mt19937_64& rng, int n) {
    std::vector<TypePoint> pts;
    std::vector<long> weights;
    long total = 0;
    while (static_cast<int>(pts.size()) < n) {
        TypePoint t{Rat(1 + rng() % 6, 1 + rng() % 2), Rat(1 + rng() % 6, 1 + rng() % 2), Rat(1)};
        bool dup = false;
        for (const auto& other : pts) dup = dup || other == t;
        if (dup) continue;
        pts.push_back(t);
        weights.push_back(1 + static_cast<long>(rng() % 4));
        total += weights.back();
    }
    for (size_t i = 0; i < pts.size(); ++i) pts[i].prob = Rat(weights[i], total);
    return BuyerDistribution(std::move(pts), "random");
}

}  // namespace

TEST_CASE("single type: every solver extracts min(v, w)") {
    const auto d = single(Rat(2), Rat(3));
    CHECK(optimal_lp_class(d, ClassSpec::SIC()).value == 2);
    CHECK(optimal_lp_class(d, ClassSpec::CB()).value == 2);
    CHECK(optimal_full(d).value == 2);
    CHECK(optimal_posted(d).value == 2);
    CHECK(optimal_posted(d).witness.entries().front().second == Lottery(Rat(1), Rat(2)));
    CHECK(brute_force_oracle(d, ClassSpec::M(), 8) == 2);
}

TEST_CASE("strong incentives collapse the two-type unbounded instance to 1") {
    const auto d = make_family(prop9_params(5, Rat(1, 2))).distribution;
    const auto sic = optimal_lp_class(d, ClassSpec::SIC());
    CHECK(sic.value == 1);
    CHECK(sic.upper_bound == 1);
    CHECK(revenue(sic.witness, d) == 1);
}

TEST_CASE("full-class optimum on the two-type instance") {
    const auto d = make_family(prop9_params(5, Rat(1, 2))).distribution;
    const auto full = optimal_full(d);
    CHECK(full.value == Rat(181, 45));
    CHECK(full.upper_bound == Rat(181, 45));
    CHECK(full.value >= 4);
    // posted price 5 plus the (1/9, 1/9) low-budget lottery
    const auto& low = full.witness.assigned({Rat(6), Rat(1), Rat(0)});
    CHECK(low == Lottery(Rat(1, 9), Rat(1, 9)));
    const auto& high = full.witness.assigned({Rat(11, 2), Rat(5), Rat(0)});
    CHECK(high == Lottery(Rat(1), Rat(5)));
}

TEST_CASE("negatively correlated instance: full optimum 1/k, cash-bond at least H_k/k") {
    const auto d = make_family(prop7_params(3)).distribution;
    const auto full = optimal_full(d);
    CHECK(full.value == Rat(1, 3));
    CHECK(full.upper_bound == Rat(1, 3));
    const auto cb = optimal_lp_class(d, ClassSpec::CB());
    CHECK(cb.value >= Rat(11, 18));
}

TEST_CASE("menu cap at or above the support size defers to the full solver") {
    const auto d = make_family(prop7_params(2)).distribution;
    const auto full = optimal_full(d);
    const auto capped = optimal_menu_limited(d, 2);
    CHECK(capped.value == full.value);
    CHECK(capped.cls.kind == MechanismClass::MENU);
}

TEST_CASE("single-lottery menus on the geometric-budget instances") {
    FamilyParams p3;
    p3.name = FamilyName::Prop3;
    p3.k = 2;
    const auto d3 = make_family(p3).distribution;
    const auto m1 = optimal_menu_limited(d3, 1);
    CHECK(m1.value <= 8);  // (m+1) B at k = 2
    CHECK(m1.value == 4);  // best posted level B
    CHECK(menu_of(m1.witness).size() <= 1);

    FamilyParams p4;
    p4.name = FamilyName::Prop4;
    p4.k = 2;
    const auto d4 = make_family(p4).distribution;
    const auto m4 = optimal_menu_limited(d4, 1);
    CHECK(m4.value <= Rat(8, 256));
    CHECK(m4.value == Rat(4, 256));
}

TEST_CASE("posted-price sweep") {
    const auto d7 = make_family(prop7_params(3)).distribution;
    const auto posted = optimal_posted(d7);
    CHECK(posted.value == Rat(1, 3));
    // every candidate earns exactly 1/3; ties break to the lowest price
    CHECK(posted.witness.entries().back().second.p() == Rat(1, 3));

    const auto d9 = make_family(prop9_params(5, Rat(1, 2))).distribution;
    CHECK(optimal_posted(d9).value == 4);
}

TEST_CASE("oracle hits the grid-aligned optima") {
    const auto d9 = make_family(prop9_params(5, Rat(1, 2))).distribution;
    CHECK(brute_force_oracle(d9, ClassSpec::M(), 45) >= 4);

    FamilyParams p11;
    p11.name = FamilyName::Prop11Pair;
    p11.H = 4;
    p11.eps = 1;
    const auto pair = make_family(p11);
    const auto oracle = brute_force_oracle(*pair.partner, ClassSpec::SIC(), 32);
    CHECK(oracle <= 1);
    CHECK(oracle >= 1 - Rat(1, 8));
}

TEST_CASE("oracle respects its size caps") {
    std::mt19937_64 rng(5);
    const auto big = random_distribution(rng, 4);
    CHECK_THROWS_AS(brute_force_oracle(big, ClassSpec::M(), 8), BudgetExceeded);
    const auto d = single(Rat(2), Rat(3));
    CHECK_THROWS_AS(brute_force_oracle(d, ClassSpec::M(), 4096), BudgetExceeded);
}

TEST_CASE("sandwich: strong-incentive <= full <= relaxation bound <= cash-bond") {
    std::mt19937_64 rng(20240813);
    for (int round = 0; round < 12; ++round) {
        const auto d = random_distribution(rng, 2 + static_cast<int>(rng() % 2));
        const auto sic = optimal_lp_class(d, ClassSpec::SIC());
        const auto full = optimal_full(d);
        const auto cb = optimal_lp_class(d, ClassSpec::CB());
        CHECK(sic.value <= full.value);
        CHECK(full.value <= full.upper_bound);
        CHECK(full.upper_bound <= cb.value);
        CHECK(full.value <= expected_min(d));
    }
}

TEST_CASE("menu monotonicity in the cap") {
    std::mt19937_64 rng(424242);
    for (int round = 0; round < 6; ++round) {
        const auto d = random_distribution(rng, 3);
        const auto full = optimal_full(d);
        Rat prev = 0;
        for (int m = 1; m <= 3; ++m) {
            const auto res = optimal_menu_limited(d, m);
            CHECK(res.value >= prev);
            CHECK(res.value <= full.value);
            prev = res.value;
        }
        CHECK(prev == full.value);
    }
}

TEST_CASE("oracle stays below the exact value and tightens as the grid doubles") {
    const auto d9 = make_family(prop9_params(5, Rat(1, 2))).distribution;
    const auto d7 = make_family(prop7_params(2)).distribution;
    for (const auto* d : {&d9, &d7}) {
        const Rat exact = optimal_full(*d).value;
        Rat prev_gap = -1;
        for (int g : {8, 16, 32}) {
            const Rat approx = brute_force_oracle(*d, ClassSpec::M(), g);
            CHECK(approx <= exact);
            const Rat gap = exact - approx;
            if (prev_gap >= 0) CHECK(gap <= prev_gap);
            prev_gap = gap;
        }
    }
}

TEST_CASE("scale equivariance across classes") {
    const Rat c = Rat(1) / (1 + Rat(1, 2));
    std::mt19937_64 rng(777);
    for (int round = 0; round < 4; ++round) {
        const auto d = random_distribution(rng, 3);
        const auto scaled = scale_distribution(d, c);
        CHECK(optimal_lp_class(scaled, ClassSpec::SIC()).value ==
              c * optimal_lp_class(d, ClassSpec::SIC()).value);
        CHECK(optimal_lp_class(scaled, ClassSpec::CB()).value ==
              c * optimal_lp_class(d, ClassSpec::CB()).value);
        CHECK(optimal_full(scaled).value == c * optimal_full(d).value);
        CHECK(optimal_posted(scaled).value == c * optimal_posted(d).value);
        CHECK(optimal_menu_limited(scaled, 1).value == c * optimal_menu_limited(d, 1).value);
    }
}

TEST_CASE("solver guards") {
    const auto d = single(Rat(2), Rat(3));
    CHECK_THROWS_AS(optimal_lp_class(d, ClassSpec::M()), std::invalid_argument);
    CHECK_THROWS_AS(optimal_menu_limited(d, 0), std::invalid_argument);

    std::mt19937_64 rng(6);
    const auto wide = random_distribution(rng, 4);
    SolveOptions tight;
    tight.assignment_cap = 2;
    CHECK_THROWS_AS(optimal_menu_limited(wide, 1, tight), BudgetExceeded);

    const auto bad = BuyerDistribution({{Rat(1), Rat(1), Rat(1, 2)}}, "deficit");
    CHECK_THROWS_AS(optimal_full(bad), std::invalid_argument);
}
