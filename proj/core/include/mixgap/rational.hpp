#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace mixgap {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt pow_bigint(BigInt base, uint64_t exp) {
  BigInt r = 1;
  while (exp != 0) {
    if (exp & 1) r *= base;
    base *= base;
    exp >>= 1;
  }
  return r;
}

// base^exp with exp possibly negative; base must be nonzero for exp < 0.
inline Rational pow_rational(const Rational& base, int64_t exp) {
  if (exp >= 0) {
    Rational r = 1;
    Rational b = base;
    uint64_t e = static_cast<uint64_t>(exp);
    while (e != 0) {
      if (e & 1) r *= b;
      b *= b;
      e >>= 1;
    }
    return r;
  }
  if (base == 0) throw std::domain_error("pow_rational: 0 to negative power");
  return 1 / pow_rational(base, -exp);
}

// Least integer >= v.
inline BigInt ceil_rational(const Rational& v) {
  BigInt q = numerator(v) / denominator(v);
  if (numerator(v) > 0 && q * denominator(v) != numerator(v)) ++q;
  return q;
}

inline BigInt floor_rational(const Rational& v) {
  BigInt q = numerator(v) / denominator(v);
  if (numerator(v) < 0 && q * denominator(v) != numerator(v)) --q;
  return q;
}

double to_double(const Rational& v);

// v rendered with 15 significant digits, correctly rounded (round half to
// even ties are irrelevant at this precision for the values we emit; we
// round half away from zero). Plain decimal for moderate exponents,
// scientific otherwise, mirroring printf %g.
std::string decimal15(const Rational& v);

// "num/den" in lowest terms ("3" when den == 1).
std::string rational_string(const Rational& v);

// Accepts "3/4", "2", "0.125", "-1/3".
Rational parse_rational(const std::string& text);

// True if v = k / 2^j for integers k, j >= 0.
bool is_dyadic(const Rational& v);

}  // namespace mixgap
