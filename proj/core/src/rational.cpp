#include "mixgap/rational.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mixgap {

double to_double(const Rational& v) { return v.convert_to<double>(); }

namespace {

// Number of decimal digits of |n|, n != 0.
int digit_count(const BigInt& n) {
  BigInt a = abs(n);
  return static_cast<int>(a.str().size());
}

}  // namespace

std::string decimal15(const Rational& v) {
  constexpr int kSig = 15;
  if (v == 0) return "0.00000000000000";

  BigInt num = abs(numerator(v));
  BigInt den = denominator(v);
  bool neg = v < 0;

  // exp10 = floor(log10(num/den)), found by digit counts then correction.
  int exp10 = digit_count(num) - digit_count(den);
  // After the estimate, num/den * 10^-exp10 is in [0.1, 100); correct to [1, 10).
  auto scaled_ge = [&](int e, const BigInt& bound_num, const BigInt& bound_den) {
    // num/den >= bound * 10^e ?
    if (e >= 0) return num * bound_den >= bound_num * den * pow_bigint(10, e);
    return num * bound_den * pow_bigint(10, -e) >= bound_num * den;
  };
  while (scaled_ge(exp10 + 1, 1, 1)) ++exp10;
  while (!scaled_ge(exp10, 1, 1)) --exp10;

  // digits = round(num/den * 10^(kSig-1-exp10)), a kSig-digit integer.
  int shift = kSig - 1 - exp10;
  BigInt scaled_num = num, scaled_den = den;
  if (shift >= 0)
    scaled_num *= pow_bigint(10, shift);
  else
    scaled_den *= pow_bigint(10, -shift);
  BigInt digits = (2 * scaled_num + scaled_den) / (2 * scaled_den);
  if (digit_count(digits) > kSig) {  // rounding carried into a new digit
    digits /= 10;
    ++exp10;
  }

  std::string ds = digits.str();
  std::string out;
  if (exp10 >= -4 && exp10 < kSig) {
    if (exp10 >= 0) {
      out = ds.substr(0, exp10 + 1) + "." + ds.substr(exp10 + 1);
      if (out.back() == '.') out.pop_back();
    } else {
      out = "0." + std::string(-exp10 - 1, '0') + ds;
    }
  } else {
    out = ds.substr(0, 1) + "." + ds.substr(1) + "e" +
          (exp10 < 0 ? "-" : "+") + std::to_string(std::abs(exp10));
  }
  return neg ? "-" + out : out;
}

std::string rational_string(const Rational& v) {
  if (denominator(v) == 1) return numerator(v).str();
  return numerator(v).str() + "/" + denominator(v).str();
}

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    BigInt n(text.substr(0, slash));
    BigInt d(text.substr(slash + 1));
    if (d == 0) throw std::invalid_argument("zero denominator: " + text);
    return Rational(n, d);
  }
  auto dot = text.find('.');
  auto epos = text.find_first_of("eE");
  if (dot == std::string::npos && epos == std::string::npos)
    return Rational(BigInt(text));
  std::string mantissa = epos == std::string::npos ? text : text.substr(0, epos);
  int64_t exp = epos == std::string::npos ? 0 : std::stoll(text.substr(epos + 1));
  dot = mantissa.find('.');
  int64_t frac_digits = 0;
  if (dot != std::string::npos) {
    frac_digits = static_cast<int64_t>(mantissa.size() - dot - 1);
    mantissa.erase(dot, 1);
  }
  if (mantissa.empty() || mantissa == "-" || mantissa == "+")
    throw std::invalid_argument("bad rational literal: " + text);
  // Strip leading zeros so the bigint parser cannot read octal.
  bool neg_m = mantissa[0] == '-';
  std::string digits_only = mantissa.substr(mantissa[0] == '-' || mantissa[0] == '+' ? 1 : 0);
  size_t nz = digits_only.find_first_not_of('0');
  digits_only = nz == std::string::npos ? "0" : digits_only.substr(nz);
  Rational r{BigInt(digits_only)};
  if (neg_m) r = -r;
  int64_t net = exp - frac_digits;
  Rational scale{pow_bigint(10, static_cast<uint64_t>(net >= 0 ? net : -net))};
  if (net >= 0) return Rational(r * scale);
  return Rational(r / scale);
}

bool is_dyadic(const Rational& v) {
  BigInt d = denominator(v);
  while (d % 2 == 0) d /= 2;
  return d == 1;
}

}  // namespace mixgap
