#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace periods {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational number, always reduced, denominator > 0.
using Rational = boost::multiprecision::cpp_rational;

inline BigInt numerator(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt denominator(const Rational& q) { return boost::multiprecision::denominator(q); }

inline double to_double(const Rational& q) { return q.template convert_to<double>(); }

Rational rational_pow(const Rational& base, unsigned exp);

/// Parses "p/q", an integer, or a decimal with optional exponent
/// ("-12.5", "1e-3") into an exact rational. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// "p/q", or just "p" when the denominator is 1.
std::string to_fraction_string(const Rational& q);

/// Rational bounds euler_lower() < e < euler_upper(), 48 decimal digits tight.
const Rational& euler_lower();
const Rational& euler_upper();

/// Sign of a + e^p * b, decided exactly by sandwiching e^p between rational
/// bounds; p >= 1. Returns 0 only when a == b == 0. Throws std::runtime_error
/// if the bounds cannot decide (never happens away from a true zero, since
/// a + e^p b = 0 with b != 0 would make e^p rational).
int sign_linear_in_euler_power(const Rational& a, const Rational& b, unsigned p);

}  // namespace periods
