#include "budgetmech/rational.hpp"

#include <stdexcept>

namespace budgetmech {

Rat parse_rat(std::string_view text) {
    if (text.empty()) {
        throw std::invalid_argument("empty rational literal");
    }
    try {
        return Rat(std::string(text));
    } catch (const std::exception&) {
        throw std::invalid_argument("bad rational literal '" + std::string(text) +
                                    "' (expected \"a\" or \"a/b\", b > 0)");
    }
}

std::string rat_str(const Rat& r) {
    return r.str();
}

std::string rat_decimal(const Rat& r, int digits) {
    BigInt num = numerator(r);
    const BigInt den = denominator(r);
    std::string sign;
    if (num < 0) {
        sign = "-";
        num = -num;
    }
    BigInt scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    const BigInt whole = num / den;
    const BigInt frac = (num % den) * scale / den;
    std::string out = sign + whole.str();
    if (digits > 0) {
        std::string f = frac.str();
        out += "." + std::string(static_cast<size_t>(digits) - f.size(), '0') + f;
    }
    return out;
}

double rat_double(const Rat& r) {
    return static_cast<double>(r);
}

Rat rat_pow(const Rat& r, long e) {
    if (e < 0) {
        if (r == 0) throw std::domain_error("rat_pow: negative power of zero");
        return 1 / rat_pow(r, -e);
    }
    Rat acc = 1;
    Rat base = r;
    unsigned long n = static_cast<unsigned long>(e);
    while (n != 0) {
        if (n & 1U) acc *= base;
        base *= base;
        n >>= 1U;
    }
    return acc;
}

long floor_log(const Rat& x, const Rat& base) {
    if (base <= 1) throw std::domain_error("floor_log: base must exceed 1");
    if (x < 1) throw std::domain_error("floor_log: x must be >= 1");
    long j = 0;
    Rat p = base;
    while (p <= x) {
        ++j;
        p *= base;
    }
    return j;
}

}  // namespace budgetmech
