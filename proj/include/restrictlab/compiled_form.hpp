#pragma once

#include "restrictlab/forms.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace restrictlab {

// Machine-integer evaluator for a form on a box |x_i| <= bound. Construction
// verifies sum |c| * bound^k < 2^62, so every evaluation on the box is exact in int64.
class CompiledForm {
 public:
  CompiledForm(const IntegerForm& form, std::int64_t coordinate_bound);

  std::size_t arity() const { return arity_; }
  unsigned degree() const { return degree_; }

  std::int64_t operator()(std::span<const std::int64_t> x) const;

  // Coefficients a_0..a_k of t -> Q(prefix, t), prefix holding the first d-1 coordinates.
  void last_coordinate_polynomial(std::span<const std::int64_t> prefix, std::span<std::int64_t> coeffs) const;

  double operator()(std::span<const double> x) const;

  // Term coefficients reduced into [0, q).
  std::vector<std::int64_t> reduced_coefficients(std::int64_t q) const;
  // Q(b) mod q for b in [0, q)^d, given reduced_coefficients(q).
  std::int64_t evaluate_mod(std::span<const std::int64_t> b, std::int64_t q,
                            std::span<const std::int64_t> reduced) const;

 private:
  struct Term {
    std::int64_t coeff;
    double coeff_real;
    std::vector<unsigned> exps;
  };
  std::size_t arity_;
  unsigned degree_;
  std::vector<Term> terms_;
  std::vector<BigInt> big_coeffs_;
};

// Real-coefficient evaluator without a box restriction (used by the quadratures).
class RealForm {
 public:
  explicit RealForm(const IntegerForm& form);
  std::size_t arity() const { return arity_; }
  unsigned degree() const { return degree_; }
  double operator()(std::span<const double> x) const;

 private:
  std::size_t arity_;
  unsigned degree_;
  std::vector<double> coeffs_;
  std::vector<std::vector<unsigned>> exps_;
};

}  // namespace restrictlab
