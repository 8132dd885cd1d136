#include "restrictlab/numeric.hpp"

#include <cstdlib>
#include <limits>

namespace restrictlab {

BigInt parse_bigint(std::string_view text) {
  std::string s(text);
  std::size_t start = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  if (start == s.size()) throw InputError("empty integer literal");
  for (std::size_t i = start; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') throw InputError("invalid integer literal: " + s);
  if (s[0] == '+') s.erase(0, 1);
  return BigInt(s);
}

std::string to_string(const BigInt& v) { return v.str(); }

std::string to_string(const Rational& v) {
  if (denominator(v) == 1) return numerator(v).str();
  return numerator(v).str() + "/" + denominator(v).str();
}

BigInt ipow(const BigInt& base, unsigned exponent) {
  return boost::multiprecision::pow(base, exponent);
}

Rational ipow(const Rational& base, unsigned exponent) {
  Rational result = 1;
  Rational b = base;
  while (exponent) {
    if (exponent & 1u) result *= b;
    exponent >>= 1;
    if (exponent) b *= b;
  }
  return result;
}

BigInt iroot_floor(const BigInt& n, unsigned k) {
  if (n < 0) throw std::domain_error("iroot_floor of negative value");
  if (k == 0) throw std::domain_error("iroot_floor with k = 0");
  if (n < 2 || k == 1) return n;
  // binary search on [0, 2^(bits/k + 1)]
  std::size_t bits = boost::multiprecision::msb(n) + 1;
  BigInt lo = 0;
  BigInt hi = BigInt(1) << static_cast<unsigned>(bits / k + 1);
  while (lo < hi) {
    BigInt mid = (lo + hi + 1) >> 1;
    if (ipow(mid, k) <= n)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

BigInt max_base_with_power_below(const Rational& bound, const Rational& scale, unsigned k) {
  if (scale <= 0) throw std::domain_error("scale must be positive");
  if (bound < 0) return BigInt(-1);
  // b^k <= bound/scale  <=>  b^k <= floor(bound/scale) for integer b
  Rational q = bound / scale;
  BigInt fl = numerator(q) / denominator(q);
  return iroot_floor(fl, k);
}

std::int64_t to_int64(const BigInt& v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error("integer does not fit in 64 bits: " + v.str());
  return v.convert_to<std::int64_t>();
}

double to_double(const Rational& v) { return v.convert_to<double>(); }

namespace {

// floor for rationals
BigInt floor_q(const Rational& x) {
  BigInt n = numerator(x), d = denominator(x);
  BigInt q = n / d;
  if (n < 0 && q * d != n) q -= 1;
  return q;
}

}  // namespace

Rational simplest_between(const Rational& lo, const Rational& hi) {
  if (lo > hi) throw std::domain_error("simplest_between: empty interval");
  BigInt fl = floor_q(lo);
  if (fl == lo) return Rational(fl);
  if (fl + 1 <= hi) return Rational(fl + 1);
  // both in (fl, fl+1): recurse on reciprocals of fractional parts
  Rational a = lo - fl, b = hi - fl;
  Rational inner = simplest_between(1 / b, 1 / a);
  return Rational(fl) + 1 / inner;
}

std::uint64_t default_budget() {
  if (const char* env = std::getenv("RESTRICTLAB_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return std::uint64_t{1} << 28;
}

}  // namespace restrictlab
