#include "restrictlab/compiled_form.hpp"

#include <cmath>
#include <stdexcept>

namespace restrictlab {

namespace {

std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t q) {
  return static_cast<std::int64_t>((static_cast<__int128>(a) * b) % q);
}

}  // namespace

CompiledForm::CompiledForm(const IntegerForm& form, std::int64_t coordinate_bound)
    : arity_(form.arity()), degree_(form.degree()) {
  if (coordinate_bound < 0) throw std::invalid_argument("negative coordinate bound");
  BigInt worst = 0;
  const BigInt power = ipow(BigInt(std::max<std::int64_t>(coordinate_bound, 1)), degree_);
  for (const auto& t : form.terms()) {
    worst += abs(t.coefficient) * power;
    big_coeffs_.push_back(t.coefficient);
    Term term;
    term.coeff = (abs(t.coefficient) < (BigInt(1) << 62)) ? t.coefficient.convert_to<std::int64_t>() : 0;
    term.coeff_real = t.coefficient.convert_to<double>();
    term.exps = t.exponents;
    terms_.push_back(std::move(term));
  }
  if (worst >= (BigInt(1) << 62))
    throw BudgetExceeded("form values on the box |x_i| <= " + std::to_string(coordinate_bound) +
                         " exceed 64-bit range");
}

std::int64_t CompiledForm::operator()(std::span<const std::int64_t> x) const {
  std::int64_t total = 0;
  for (const auto& t : terms_) {
    std::int64_t mono = t.coeff;
    for (std::size_t i = 0; i < arity_; ++i)
      for (unsigned e = 0; e < t.exps[i]; ++e) mono *= x[i];
    total += mono;
  }
  return total;
}

void CompiledForm::last_coordinate_polynomial(std::span<const std::int64_t> prefix,
                                              std::span<std::int64_t> coeffs) const {
  std::fill(coeffs.begin(), coeffs.end(), 0);
  const std::size_t last = arity_ - 1;
  for (const auto& t : terms_) {
    std::int64_t mono = t.coeff;
    for (std::size_t i = 0; i < last; ++i)
      for (unsigned e = 0; e < t.exps[i]; ++e) mono *= prefix[i];
    coeffs[t.exps[last]] += mono;
  }
}

double CompiledForm::operator()(std::span<const double> x) const {
  double total = 0;
  for (const auto& t : terms_) {
    double mono = t.coeff_real;
    for (std::size_t i = 0; i < arity_; ++i)
      if (t.exps[i]) mono *= std::pow(x[i], t.exps[i]);
    total += mono;
  }
  return total;
}

std::vector<std::int64_t> CompiledForm::reduced_coefficients(std::int64_t q) const {
  std::vector<std::int64_t> out;
  for (const auto& c : big_coeffs_) {
    BigInt r = c % q;
    if (r < 0) r += q;
    out.push_back(r.convert_to<std::int64_t>());
  }
  return out;
}

std::int64_t CompiledForm::evaluate_mod(std::span<const std::int64_t> b, std::int64_t q,
                                        std::span<const std::int64_t> reduced) const {
  std::int64_t total = 0;
  for (std::size_t ti = 0; ti < terms_.size(); ++ti) {
    std::int64_t mono = reduced[ti];
    for (std::size_t i = 0; i < arity_; ++i)
      for (unsigned e = 0; e < terms_[ti].exps[i]; ++e) mono = mulmod(mono, b[i], q);
    total += mono;
    if (total >= q) total -= q;
  }
  return total;
}

RealForm::RealForm(const IntegerForm& form) : arity_(form.arity()), degree_(form.degree()) {
  for (const auto& t : form.terms()) {
    coeffs_.push_back(t.coefficient.convert_to<double>());
    exps_.push_back(t.exponents);
  }
}

double RealForm::operator()(std::span<const double> x) const {
  double total = 0;
  for (std::size_t t = 0; t < coeffs_.size(); ++t) {
    double mono = coeffs_[t];
    for (std::size_t i = 0; i < arity_; ++i)
      for (unsigned e = 0; e < exps_[t][i]; ++e) mono *= x[i];
    total += mono;
  }
  return total;
}

}  // namespace restrictlab
