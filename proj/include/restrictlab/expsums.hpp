#pragma once

#include "restrictlab/forms.hpp"
#include "restrictlab/lattice.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace restrictlab {

using Complex = std::complex<double>;

// e(t) = exp(-2 pi i t).
Complex e(double t);
// e(r/q) with r reduced exactly into [0, q) first.
Complex e_frac(std::int64_t r, std::int64_t q);

// Reduced fraction a/q. The pair (0, 1) is the only admissible fraction with q = 1.
struct FractionAQ {
  std::int64_t a = 0;
  std::int64_t q = 1;
  FractionAQ() = default;
  FractionAQ(std::int64_t a_, std::int64_t q_);  // validates
  bool operator==(const FractionAQ&) const = default;
};

// U_q: a in [1, q) coprime to q, and {0} for q = 1.
std::vector<FractionAQ> unit_fractions(std::int64_t q);

// G(a, q; m) = q^{-d} sum_{b mod q} e((a Q(b) + b.m) / q), by direct summation.
Complex gauss_sum(const IntegerForm& form, const FractionAQ& f, std::span<const std::int64_t> m);

struct WeylSumTable {
  FractionAQ fraction;
  std::size_t dim = 0;
  std::vector<Complex> values;  // row-major over m in [0, q)^d
  Complex at(std::span<const std::int64_t> m) const;  // m taken mod q
};

// All m at once through a d-dimensional DFT of b -> e(a Q(b)/q).
WeylSumTable gauss_sum_table(const IntegerForm& form, const FractionAQ& f, std::uint64_t budget = default_budget());

// 1-D factor q^{-1} sum_b e((a c b^k + b m)/q); a diagonal G is the product of these.
Complex gauss_sum_1d(std::int64_t c, unsigned k, const FractionAQ& f, std::int64_t m);

struct WeylRow {
  std::int64_t q;
  double sup_abs;     // sup over a in U_q and m of |G(a,q;m)|
  std::int64_t a_at;  // a attaining the sup (first in order)
  double margin;      // sup * q^kappa
};

struct WeylReport {
  std::vector<WeylRow> rows;
  double slope = 0;  // least squares slope of log sup vs log q over rows with q > 1 and sup > 0
};

struct WeylOptions {
  bool odd_only = false;
  std::uint64_t budget = default_budget();
};

WeylReport weyl_decay_report(const IntegerForm& form, std::int64_t q_max, const Rational& kappa,
                             const WeylOptions& options = {});

// Least squares slope of y against x.
double fitted_slope(std::span<const double> x, std::span<const double> y);

// E a(xi) = sum_x a(x) e(x . xi) over the solution set; a = 1 when weights are empty.
Complex raw_extension_sum(const LatticeSolutionSet& set, std::span<const Complex> weights, std::span<const double> xi);
// Rational frequencies: the phase x . xi is reduced exactly before evaluation.
Complex raw_extension_sum(const LatticeSolutionSet& set, std::span<const Complex> weights,
                          std::span<const Rational> xi);

// Pairwise (cascade) sum with a fixed association order.
Complex pairwise_sum(std::span<const Complex> terms);

}  // namespace restrictlab
