#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace sg {

// Exact arithmetic for probabilities and the reference oracle. cpp_rational
// keeps values normalized (gcd-reduced, positive denominator).
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

// Parses "1/3" (fraction) or "0.25" / "1" / ".5" (decimal). No signs, no
// exponents: the grammar is exactly what the model format allows. Throws
// std::invalid_argument on anything else, including "1/0".
Rational parse_probability(const std::string& text);

// Canonical text form: integer "p" when the denominator is 1, else "p/q".
std::string to_fraction_string(const Rational& r);

double to_double(const Rational& r);

}  // namespace sg
