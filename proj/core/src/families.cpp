#include "budgetmech/families.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace budgetmech {

namespace {

int require_k(const FamilyParams& p, int minimum = 2) {
    if (!p.k || *p.k < minimum) {
        throw std::invalid_argument(family_name_str(p.name) + " needs k >= " +
                                    std::to_string(minimum));
    }
    return *p.k;
}

int require_n(const FamilyParams& p) {
    if (!p.n || *p.n < 1) {
        throw std::invalid_argument(family_name_str(p.name) + " needs a truncation length n >= 1");
    }
    return *p.n;
}

Rat require_B(const FamilyParams& p) {
    if (!p.B || *p.B <= 1) throw std::invalid_argument(family_name_str(p.name) + " needs B > 1");
    return *p.B;
}

Rat require_H(const FamilyParams& p) {
    if (!p.H || *p.H <= 1) throw std::invalid_argument(family_name_str(p.name) + " needs H > 1");
    return *p.H;
}

Rat require_eps(const FamilyParams& p) {
    if (!p.eps || *p.eps <= 0) {
        throw std::invalid_argument(family_name_str(p.name) + " needs eps > 0");
    }
    return *p.eps;
}

// Geometric masses shared by the prop3/prop4 supports:
// f_i = (1 - 1/B) B^-(i-1) for i < k and the geometric remainder at i = k.
std::vector<Rat> geometric_masses(const Rat& B, int k) {
    std::vector<Rat> f;
    Rat rest = 1;
    for (int i = 1; i < k; ++i) {
        const Rat fi = (1 - 1 / B) * rat_pow(B, -(i - 1));
        f.push_back(fi);
        rest -= fi;
    }
    f.push_back(rest);
    return f;
}

// Continued-fraction convergent of sqrt(2) with error below 10^-digits.
Rat sqrt2_approx(int digits) {
    BigInt p = 1, q = 1;
    const BigInt target = rat_pow(Rat(10), digits).convert_to<BigInt>() + 1;
    while (q * q < target) {
        const BigInt np = p + 2 * q;
        const BigInt nq = p + q;
        p = np;
        q = nq;
    }
    return Rat(p, q);
}

// lemma5 marginal masses at a given sqrt(2) stand-in, truncated to n.
std::vector<Rat> lemma5_marginals(const Rat& root2, int n) {
    std::vector<Rat> m;
    const Rat lead = 1 / (1 + root2);
    Rat pw = 1;
    for (int i = 1; i <= n; ++i) {
        pw /= root2;
        m.push_back(lead * pw);
    }
    return m;
}

BuyerDistribution lemma5_distribution(const Rat& root2, int n, const std::string& label) {
    const auto m = lemma5_marginals(root2, n);
    Rat total = 0;
    for (const auto& x : m) total += x;
    std::vector<TypePoint> pts;
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            pts.push_back({rat_pow(Rat(2), 2 * i), rat_pow(Rat(2), j),
                           m[static_cast<size_t>(i - 1)] * m[static_cast<size_t>(j - 1)] /
                               (total * total)});
        }
    }
    return BuyerDistribution(std::move(pts), label);
}

}  // namespace

std::string family_name_str(FamilyName name) {
    switch (name) {
        case FamilyName::Prop3: return "prop3";
        case FamilyName::Prop4: return "prop4";
        case FamilyName::Lemma4Trunc: return "lemma4_trunc";
        case FamilyName::Lemma5Trunc: return "lemma5_trunc";
        case FamilyName::Prop7: return "prop7";
        case FamilyName::Prop8Pair: return "prop8_pair";
        case FamilyName::Prop9: return "prop9";
        case FamilyName::Prop10: return "prop10";
        case FamilyName::Prop11Pair: return "prop11_pair";
    }
    return "?";
}

FamilyName parse_family_name(const std::string& text) {
    for (FamilyName f :
         {FamilyName::Prop3, FamilyName::Prop4, FamilyName::Lemma4Trunc, FamilyName::Lemma5Trunc,
          FamilyName::Prop7, FamilyName::Prop8Pair, FamilyName::Prop9, FamilyName::Prop10,
          FamilyName::Prop11Pair}) {
        if (family_name_str(f) == text) return f;
    }
    throw std::invalid_argument("unknown family '" + text + "'");
}

FamilyResult make_family(const FamilyParams& params) {
    FamilyResult out;
    switch (params.name) {
        case FamilyName::Prop3: {
            const int k = require_k(params);
            const Rat B = 2 * k;
            const Rat vbar = rat_pow(B, k + 1);
            const auto f = geometric_masses(B, k);
            std::vector<TypePoint> pts;
            for (int i = 1; i <= k; ++i) {
                pts.push_back({vbar, rat_pow(B, i), f[static_cast<size_t>(i - 1)]});
            }
            out.distribution = BuyerDistribution(std::move(pts), "prop3-k" + std::to_string(k));
            break;
        }
        case FamilyName::Prop4: {
            const int k = require_k(params);
            const Rat B = 2 * k;
            const long Bint = 2L * k;
            const auto f = geometric_masses(B, k);
            std::vector<TypePoint> pts;
            for (int i = 1; i <= k; ++i) {
                pts.push_back({Rat(1), rat_pow(B, i - Bint), f[static_cast<size_t>(i - 1)]});
            }
            out.distribution = BuyerDistribution(std::move(pts), "prop4-k" + std::to_string(k));
            break;
        }
        case FamilyName::Lemma4Trunc: {
            const int n = require_n(params);
            const Rat kept = 1 - rat_pow(Rat(2), -n);
            std::vector<TypePoint> pts;
            for (int i = 1; i <= n; ++i) {
                pts.push_back({rat_pow(Rat(2), 2 * i), rat_pow(Rat(2), i),
                               rat_pow(Rat(2), -i) / kept});
            }
            out.distribution =
                BuyerDistribution(std::move(pts), "lemma4_trunc-n" + std::to_string(n));
            out.tail_mass = 1 - kept;
            break;
        }
        case FamilyName::Lemma5Trunc: {
            const int n = require_n(params);
            const int digits = params.precision.value_or(30);
            if (digits < 1) throw std::invalid_argument("lemma5_trunc needs precision >= 1");
            const Rat root2 = sqrt2_approx(digits + 2);
            const std::string label = "lemma5_trunc-n" + std::to_string(n);
            out.distribution = lemma5_distribution(root2, n, label);
            const auto m = lemma5_marginals(root2, n);
            Rat total = 0;
            for (const auto& x : m) total += x;
            out.tail_mass = 1 - total * total;
            // Residual bound: recompute at one deeper convergent and sum
            // the joint-mass differences.
            const Rat finer = sqrt2_approx(digits + 6);
            const auto refined = lemma5_distribution(finer, n, label);
            Rat residual = 0;
            for (size_t i = 0; i < out.distribution.size(); ++i) {
                const Rat diff =
                    out.distribution.points()[i].prob - refined.points()[i].prob;
                residual += diff < 0 ? -diff : diff;
            }
            out.approx_residual = residual;
            break;
        }
        case FamilyName::Prop7: {
            const int k = require_k(params);
            std::vector<TypePoint> pts;
            for (int i = 1; i <= k; ++i) {
                pts.push_back({Rat(1, i), 1 + Rat(i, k), Rat(1, k)});
            }
            out.distribution = BuyerDistribution(std::move(pts), "prop7-k" + std::to_string(k));
            break;
        }
        case FamilyName::Prop8Pair: {
            const int k = require_k(params);
            FamilyParams base = params;
            base.name = FamilyName::Prop7;
            out.distribution = make_family(base).distribution;
            std::vector<TypePoint> pts;
            for (int i = 1; i <= k; ++i) {
                pts.push_back({Rat(1, i), Rat(2), Rat(1, k)});
            }
            out.partner = BuyerDistribution(std::move(pts), "prop8-flat-k" + std::to_string(k));
            break;
        }
        case FamilyName::Prop9: {
            const Rat B = require_B(params);
            const Rat eps = require_eps(params);
            std::vector<TypePoint> pts{{B + eps, B, 1 - 1 / B}, {B + 2 * eps, Rat(1), 1 / B}};
            out.distribution =
                BuyerDistribution(std::move(pts), "prop9-B" + rat_str(B) + "-e" + rat_str(eps));
            break;
        }
        case FamilyName::Prop10: {
            const Rat B = require_B(params);
            const Rat eps = require_eps(params);
            FamilyParams base = params;
            base.name = FamilyName::Prop9;
            const auto inner = make_family(base).distribution;
            out.distribution = scale_distribution(inner, 1 / (B + 2 * eps));
            break;
        }
        case FamilyName::Prop11Pair: {
            const Rat H = require_H(params);
            const Rat eps = require_eps(params);
            std::vector<TypePoint> first{{H, Rat(1), 1 / H}, {H, H, 1 - 1 / H}};
            std::vector<TypePoint> second{{H + eps, Rat(1), 1 / H}, {H, H, 1 - 1 / H}};
            out.distribution =
                BuyerDistribution(std::move(first), "prop11-base-H" + rat_str(H));
            out.partner = BuyerDistribution(std::move(second),
                                            "prop11-shift-H" + rat_str(H) + "-e" + rat_str(eps));
            break;
        }
    }
    out.distribution.require_valid();
    if (out.partner) out.partner->require_valid();
    return out;
}

Mechanism witness_mechanism(const FamilyParams& params) {
    switch (params.name) {
        case FamilyName::Prop3:
        case FamilyName::Prop4: {
            const int k = require_k(params);
            const Rat B = 2 * k;
            const Rat scale = params.name == FamilyName::Prop4 ? rat_pow(B, -2L * k) : Rat(1);
            const auto d = make_family(params).distribution;
            std::vector<Lottery> lots;
            for (const auto& t : d.points()) {
                int level = 0;  // budget is B^i (scaled); recover i
                for (int i = 1; i <= k; ++i) {
                    if (t.w == rat_pow(B, i) * scale) level = i;
                }
                const Rat q = Rat(1, 2) + Rat(level) / B;
                lots.emplace_back(q, q * t.w);  // full budget extraction on a win
            }
            return Mechanism(d, std::move(lots));
        }
        case FamilyName::Lemma4Trunc: {
            const auto d = make_family(params).distribution;
            std::vector<Lottery> lots;
            for (const auto& t : d.points()) {
                const Rat q = 1 - 1 / t.w;  // budget is 2^i, so q_i = 1 - 2^-i
                lots.emplace_back(q, q * t.w);
            }
            return Mechanism(d, std::move(lots));
        }
        case FamilyName::Lemma5Trunc: {
            const int n = require_n(params);
            const auto d = make_family(params).distribution;
            std::vector<Lottery> lots;
            for (const auto& t : d.points()) {
                int i = 0, j = 0;
                for (int c = 1; c <= n; ++c) {
                    if (t.v == rat_pow(Rat(2), 2 * c)) i = c;
                    if (t.w == rat_pow(Rat(2), c)) j = c;
                }
                const int entry = std::min(i, j);
                const Rat q = 1 - rat_pow(Rat(2), -entry);
                lots.emplace_back(q, q * rat_pow(Rat(2), entry));
            }
            return Mechanism(d, std::move(lots));
        }
        case FamilyName::Prop7: {
            const auto d = make_family(params).distribution;
            std::vector<Lottery> lots;
            for (const auto& t : d.points()) {
                lots.emplace_back(Rat(1), t.v);  // guaranteed win priced at the valuation
            }
            return Mechanism(d, std::move(lots));
        }
        default:
            throw std::invalid_argument("no witness mechanism for family " +
                                        family_name_str(params.name));
    }
}

long round_down_type_bound(const Rat& eps, const Rat& L, const Rat& H) {
    const long levels = 1 + floor_log(H / L, 1 + eps);
    return levels * levels;
}

BuyerDistribution round_down(const BuyerDistribution& d, const Rat& eps, const Rat& L,
                             const Rat& H) {
    if (eps <= 0) throw std::invalid_argument("round_down needs eps > 0");
    if (L <= 0 || L >= H) throw std::invalid_argument("round_down needs 0 < L < H");
    for (const auto& t : d.points()) {
        if (t.v < L || t.v > H || t.w < L || t.w > H) {
            throw std::invalid_argument("support point " + point_str(t) + " outside [" +
                                        rat_str(L) + ", " + rat_str(H) + "]^2");
        }
    }
    const Rat base = 1 + eps;
    auto snap = [&](const Rat& x) {
        Rat p = 1;
        while (p * base <= x) p *= base;
        return p;
    };
    std::map<std::pair<Rat, Rat>, Rat> merged;
    for (const auto& t : d.points()) {
        merged[{snap(t.v / L), snap(t.w / L)}] += t.prob;
    }
    std::vector<TypePoint> pts;
    for (const auto& [vw, mass] : merged) {
        pts.push_back({vw.first, vw.second, mass});
    }
    return BuyerDistribution(std::move(pts), d.label() + "-rounded");
}

Lottery example1_query(const Example1Params& params, const Rat& w) {
    if (params.v_hat <= 1) throw std::invalid_argument("example1 needs v_hat > 1");
    if (params.w_c <= 0 || params.w_c >= 1) {
        throw std::invalid_argument("example1 needs w_c in (0, 1)");
    }
    if (w < 0 || w > 1) {
        throw std::invalid_argument("budget " + rat_str(w) + " outside [0, 1]");
    }
    if (w >= params.w_c) return Lottery(Rat(1), params.w_c);
    const Rat q = (params.v_hat - params.w_c) / (params.v_hat - w);
    return Lottery(q, w * q);
}

double example1_revenue(double v_hat, double c) {
    return (v_hat - c) * (v_hat * std::log(v_hat / (v_hat - c)) - c) + c * (1 - c);
}

Example1Optimum example1_optimal_wc(const Rat& v_hat, double tolerance) {
    if (v_hat <= 1) throw std::invalid_argument("example1 needs v_hat > 1");
    if (tolerance <= 0 || tolerance >= 1) throw std::invalid_argument("bad tolerance");
    const double v = rat_double(v_hat);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = tolerance, hi = 1 - tolerance;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = example1_revenue(v, x1);
    double f2 = example1_revenue(v, x2);
    while (hi - lo > tolerance) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = example1_revenue(v, x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = example1_revenue(v, x1);
        }
    }
    const double c = (lo + hi) / 2;
    return {c, example1_revenue(v, c)};
}

BuyerDistribution example1_discretized(const Rat& v_hat, int n) {
    if (v_hat <= 1) throw std::invalid_argument("example1 needs v_hat > 1");
    if (n < 1) throw std::invalid_argument("grid size must be >= 1");
    std::vector<TypePoint> pts;
    for (int j = 0; j < n; ++j) {
        pts.push_back({v_hat, Rat(j, n), Rat(1, n)});
    }
    return BuyerDistribution(std::move(pts), "example1-grid" + std::to_string(n));
}

}  // namespace budgetmech
