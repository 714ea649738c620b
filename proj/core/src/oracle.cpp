#include "budgetmech/solvers.hpp"

#include "budgetmech/errors.hpp"

#include <algorithm>
#include <stdexcept>

namespace budgetmech {

namespace {

// The oracle enumerates per-type lotteries on the grid q = a/g,
// win price P = b/g, so every compared quantity is an integer once the
// instance data is lifted to a common denominator. Num is the integer
// carrier: long long when everything fits comfortably, BigInt otherwise.
template <typename Num>
struct GridSearch {
    struct Candidate {
        int a = 0;            // q numerator over g
        Num price = Num(0);   // win price scaled by the common denominator
        std::vector<Num> dev; // deviation utility for each type claiming this lottery
        Num contrib = Num(0); // mass-weighted expected payment, scaled
        Num own_utility = Num(0);
    };

    MechanismClass kind = MechanismClass::M;
    int menu_cap = 0;
    int g = 1;
    std::vector<Num> v, w, f;               // scaled instance data
    std::vector<std::vector<Candidate>> cands;
    std::vector<Num> suffix_potential;
    std::vector<const Candidate*> chosen;
    std::vector<size_t> chosen_index;
    Num best = Num(0);
    std::vector<size_t> best_combo;
    bool have_best = false;

    bool affordable(size_t deviator, const Candidate& c) const {
        return c.a == 0 || c.price <= w[deviator];
    }

    bool pair_ok(size_t i, const Candidate& ci, size_t j, const Candidate& cj) const {
        // deviation of i toward j's lottery
        switch (kind) {
            case MechanismClass::SIC:
                if (ci.own_utility < cj.dev[i]) return false;
                break;
            case MechanismClass::CB:
                if (w[j] <= w[i] && ci.own_utility < cj.dev[i]) return false;
                break;
            default:
                if (affordable(i, cj) && ci.own_utility < cj.dev[i]) return false;
                break;
        }
        return true;
    }

    bool leaf_ok() const {
        if (kind == MechanismClass::MENU) {
            std::vector<std::pair<int, Num>> menu;
            for (const auto* c : chosen) {
                if (c->a == 0) continue;
                std::pair<int, Num> key{c->a, c->price};
                if (std::find(menu.begin(), menu.end(), key) == menu.end()) menu.push_back(key);
            }
            return static_cast<int>(menu.size()) <= menu_cap;
        }
        if (kind == MechanismClass::POSTED) {
            const Num* price = nullptr;
            for (const auto* c : chosen) {
                if (c->a == 0) continue;
                if (c->a != g) return false;
                if (price && *price != c->price) return false;
                price = &c->price;
            }
        }
        return true;
    }

    void dfs(size_t t, Num partial) {
        const size_t n = cands.size();
        if (t == n) {
            if (leaf_ok() && (!have_best || partial > best)) {
                best = partial;
                best_combo = chosen_index;
                have_best = true;
            }
            return;
        }
        if (have_best && partial + suffix_potential[t] <= best) return;
        for (size_t ci = 0; ci < cands[t].size(); ++ci) {
            const Candidate& c = cands[t][ci];
            if (have_best && partial + c.contrib + (t + 1 < n ? suffix_potential[t + 1] : Num(0)) <= best) {
                break;  // candidates are ordered by contribution
            }
            bool ok = true;
            for (size_t u = 0; u < t && ok; ++u) {
                ok = pair_ok(u, *chosen[u], t, c) && pair_ok(t, c, u, *chosen[u]);
            }
            if (!ok) continue;
            chosen.push_back(&c);
            chosen_index.push_back(ci);
            dfs(t + 1, partial + c.contrib);
            chosen.pop_back();
            chosen_index.pop_back();
        }
    }
};

template <typename Num>
Num to_scaled(const Rat& r, const BigInt& scale) {
    const Rat scaled = r * Rat(scale);
    if (denominator(scaled) != 1) throw std::logic_error("oracle scaling failed");
    return static_cast<Num>(numerator(scaled).template convert_to<Num>());
}

template <>
BigInt to_scaled<BigInt>(const Rat& r, const BigInt& scale) {
    const Rat scaled = r * Rat(scale);
    if (denominator(scaled) != 1) throw std::logic_error("oracle scaling failed");
    return numerator(scaled);
}

template <typename Num>
Rat run_grid_search(const BuyerDistribution& d, const ClassSpec& cls, int g,
                    const BigInt& value_scale, const BigInt& mass_scale) {
    const auto& pts = d.points();
    const size_t n = pts.size();
    GridSearch<Num> gs;
    gs.kind = cls.kind;
    gs.menu_cap = cls.menu_cap.value_or(0);
    gs.g = g;
    for (const auto& t : pts) {
        gs.v.push_back(to_scaled<Num>(t.v, value_scale));
        gs.w.push_back(to_scaled<Num>(t.w, value_scale));
        gs.f.push_back(to_scaled<Num>(t.prob, mass_scale));
    }

    Rat wmax = 0;
    for (const auto& t : pts) wmax = std::max(wmax, t.w);
    const BigInt price_steps_big = numerator(Rat(g) * wmax) / denominator(Rat(g) * wmax);
    const long price_steps = price_steps_big.convert_to<long>();
    const Num step = to_scaled<Num>(Rat(1, g), value_scale);

    gs.cands.resize(n);
    for (size_t i = 0; i < n; ++i) {
        auto& list = gs.cands[i];
        typename GridSearch<Num>::Candidate trivial;
        trivial.dev.assign(n, Num(0));
        list.push_back(trivial);
        const Num cap = std::min(gs.v[i], gs.w[i]);
        for (int a = 1; a <= g; ++a) {
            for (long b = 0; b <= price_steps; ++b) {
                const Num price = step * b;
                if (price > cap) break;
                typename GridSearch<Num>::Candidate c;
                c.a = a;
                c.price = price;
                c.own_utility = (gs.v[i] - price) * a;
                c.contrib = gs.f[i] * price * a;
                c.dev.reserve(n);
                for (size_t k = 0; k < n; ++k) c.dev.push_back((gs.v[k] - price) * a);
                list.push_back(std::move(c));
            }
        }
        std::stable_sort(list.begin(), list.end(),
                         [](const auto& x, const auto& y) { return x.contrib > y.contrib; });
    }

    gs.suffix_potential.assign(n, Num(0));
    for (size_t i = n; i-- > 0;) {
        Num top = Num(0);
        for (const auto& c : gs.cands[i]) top = std::max(top, c.contrib);
        gs.suffix_potential[i] = top + (i + 1 < n ? gs.suffix_potential[i + 1] : Num(0));
    }

    gs.chosen.reserve(n);
    gs.dfs(0, Num(0));
    if (!gs.have_best) return 0;

    // Rebuild the winning combination and re-check it with the public
    // feasibility predicate before trusting the value.
    std::vector<Lottery> lots;
    for (size_t i = 0; i < n; ++i) {
        const auto& c = gs.cands[i][gs.best_combo[i]];
        const Rat q(c.a, g);
        const Rat price = Rat(BigInt(c.price)) / Rat(value_scale);
        lots.emplace_back(q, q * price);
    }
    const Mechanism mech(d, std::move(lots));
    if (!check_feasible(mech, d, cls).feasible()) {
        throw std::logic_error("oracle winner failed feasibility re-check");
    }
    const Rat value = revenue(mech, d);
    if (value != Rat(BigInt(gs.best)) / (Rat(mass_scale) * Rat(value_scale) * g)) {
        throw std::logic_error("oracle revenue accounting mismatch");
    }
    return value;
}

}  // namespace

Rat brute_force_oracle(const BuyerDistribution& d, const ClassSpec& cls, int grid,
                       const SolveOptions& opts) {
    d.require_valid();
    if (d.size() > 3) {
        throw BudgetExceeded("oracle limited to 3 support types, got " +
                             std::to_string(d.size()));
    }
    if (grid < 1 || grid > opts.oracle_grid_cap) {
        throw BudgetExceeded("oracle grid " + std::to_string(grid) + " outside [1, " +
                             std::to_string(opts.oracle_grid_cap) + "]");
    }
    if (cls.kind == MechanismClass::MENU && !cls.menu_cap) {
        throw std::invalid_argument("menu class needs a cap");
    }

    BigInt value_scale = grid;
    BigInt mass_scale = 1;
    Rat vmax = 0;
    for (const auto& t : d.points()) {
        value_scale = boost::multiprecision::lcm(value_scale, denominator(t.v));
        value_scale = boost::multiprecision::lcm(value_scale, denominator(t.w));
        mass_scale = boost::multiprecision::lcm(mass_scale, denominator(t.prob));
        vmax = std::max({vmax, t.v, t.w});
    }

    // products reach (v*scale) * grid * mass; keep a wide margin for int64
    const BigInt magnitude = numerator(vmax * Rat(value_scale)) * grid * mass_scale;
    if (magnitude < BigInt(1) << 40) {
        return run_grid_search<long long>(d, cls, grid, value_scale, mass_scale);
    }
    return run_grid_search<BigInt>(d, cls, grid, value_scale, mass_scale);
}

}  // namespace budgetmech
