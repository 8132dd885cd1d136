#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace restrictlab {

using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

// Raised when an input is structurally invalid (bad arity, malformed file, ...).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an operation would exceed the configured memory/work budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

BigInt parse_bigint(std::string_view text);
std::string to_string(const BigInt& v);
std::string to_string(const Rational& v);

BigInt ipow(const BigInt& base, unsigned exponent);
Rational ipow(const Rational& base, unsigned exponent);

// Largest r >= 0 with r^k <= n (n >= 0).
BigInt iroot_floor(const BigInt& n, unsigned k);

// Largest integer b >= 0 with b^k * scale <= bound, for rational scale > 0, bound >= 0.
BigInt max_base_with_power_below(const Rational& bound, const Rational& scale, unsigned k);

std::int64_t to_int64(const BigInt& v);  // throws on overflow
double to_double(const Rational& v);

// Simplest rational (smallest denominator) in the closed interval [lo, hi], lo <= hi.
Rational simplest_between(const Rational& lo, const Rational& hi);

// Default histogram/grid budget (entries). Overridden by RESTRICTLAB_BUDGET.
std::uint64_t default_budget();

}  // namespace restrictlab
