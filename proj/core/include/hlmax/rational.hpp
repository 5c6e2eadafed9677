#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace hlmax {

using Rational = mpq_class;

/// Parses "-12", "0.375", "1.5e-3" or "3/8" exactly.
Rational parse_rational(std::string_view text);

/// Exact value of a binary double.
Rational rational_from_double(double value);

/// Decimal text when the denominator is of the form 2^a 5^b, "p/q" otherwise.
std::string to_exact_string(const Rational& value);

inline double to_double(const Rational& value) { return value.get_d(); }

/// Rational square root when both numerator and denominator are perfect squares.
bool exact_sqrt(const Rational& value, Rational& root);

}  // namespace hlmax
