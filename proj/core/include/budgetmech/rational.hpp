#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace budgetmech {

/// Exact rational number. All prices, probabilities and revenues in the
/// library are of this type; only the Example-1 budget-level optimizer
/// works in doubles.
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Parses "a/b" or "a" (arbitrary precision, lowest terms on return).
/// Throws std::invalid_argument on anything else, including "a/0".
Rat parse_rat(std::string_view text);

/// Renders in the same "a/b" / "a" format parse_rat accepts.
std::string rat_str(const Rat& r);

/// Fixed-point decimal rendering with `digits` fractional digits,
/// truncated toward zero. Deterministic; used for CSV output.
std::string rat_decimal(const Rat& r, int digits = 9);

double rat_double(const Rat& r);

/// r^e for integer e (e may be negative; r must be nonzero then).
Rat rat_pow(const Rat& r, long e);

/// Largest integer j >= 0 with base^j <= x, where base > 1 and x >= 1.
long floor_log(const Rat& x, const Rat& base);

}  // namespace budgetmech
