#ifndef NAP_RATIONAL_HPP
#define NAP_RATIONAL_HPP

#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace nap {

// Arbitrary precision, always canonicalized, denominator > 0.
using Rational = mpq_class;
using Integer = mpz_class;

Rational make_rational(std::int64_t num, std::int64_t den = 1);

// Ratio of two counts; den must be nonzero.
Rational count_ratio(std::size_t num, std::size_t den);

// Always "p/q", including integers ("1/1") so that reports are uniform.
std::string to_string(const Rational& q);

// Accepts "p/q" or "p".
Rational parse_rational(std::string_view text);

} // namespace nap

#endif
