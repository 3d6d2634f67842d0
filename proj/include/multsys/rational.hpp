#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace multsys {

/// Arbitrary-precision rational; always kept in canonical form.
using Rational = mpq_class;

/// Parses "p/q", "p", or a finite decimal such as "-0.125" exactly.
/// Throws Error(ParseError) on malformed input or zero denominator.
Rational parse_rational(std::string_view text);

/// num/den in canonical form; den > 0.
Rational ratio(long num, unsigned long den);

/// Canonical "p/q" (or "p" when q = 1).
std::string to_string(const Rational& value);

/// Exact rational value of a finite double.
Rational rational_from_double(double value);

double to_double(const Rational& value);

Rational abs(const Rational& value);

/// value^exponent for exponent >= 0, exactly.
Rational pow(const Rational& value, unsigned exponent);

int sign(const Rational& value);

}  // namespace multsys
