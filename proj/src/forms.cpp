#include "restrictlab/forms.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace restrictlab {

unsigned MonomialTerm::total_degree() const {
  return std::accumulate(exponents.begin(), exponents.end(), 0u);
}

IntegerForm::IntegerForm(std::size_t arity, std::vector<MonomialTerm> terms) : arity_(arity), degree_(0) {
  if (arity == 0) throw InputError("form arity must be positive");
  for (const auto& t : terms)
    if (t.exponents.size() != arity)
      throw InputError("term exponent vector length " + std::to_string(t.exponents.size()) +
                       " does not match arity " + std::to_string(arity));
  std::sort(terms.begin(), terms.end(),
            [](const MonomialTerm& a, const MonomialTerm& b) { return a.exponents < b.exponents; });
  for (auto& t : terms) {
    if (!terms_.empty() && terms_.back().exponents == t.exponents)
      terms_.back().coefficient += t.coefficient;
    else
      terms_.push_back(std::move(t));
  }
  std::erase_if(terms_, [](const MonomialTerm& t) { return t.coefficient == 0; });
  if (terms_.empty()) throw InputError("form has no nonzero terms");
  degree_ = terms_.front().total_degree();
  if (degree_ == 0) throw InputError("form degree must be at least 1");
  for (const auto& t : terms_)
    if (t.total_degree() != degree_) throw InputError("form is not homogeneous");
}

IntegerForm IntegerForm::diagonal(std::size_t arity, unsigned degree, std::vector<BigInt> coefficients) {
  if (coefficients.empty()) coefficients.assign(arity, BigInt(1));
  if (coefficients.size() != arity) throw InputError("diagonal: coefficient count does not match arity");
  std::vector<MonomialTerm> terms;
  for (std::size_t i = 0; i < arity; ++i) {
    std::vector<unsigned> e(arity, 0);
    e[i] = degree;
    terms.push_back({coefficients[i], std::move(e)});
  }
  return IntegerForm(arity, std::move(terms));
}

bool IntegerForm::is_diagonal() const {
  return std::all_of(terms_.begin(), terms_.end(), [&](const MonomialTerm& t) {
    return std::count(t.exponents.begin(), t.exponents.end(), 0u) == static_cast<long>(arity_ - 1);
  });
}

std::vector<BigInt> IntegerForm::pure_power_coefficients() const {
  std::vector<BigInt> out(arity_, BigInt(0));
  for (const auto& t : terms_)
    for (std::size_t i = 0; i < arity_; ++i)
      if (t.exponents[i] == degree_) out[i] = t.coefficient;
  return out;
}

void IntegerForm::check_arity(std::size_t n) const {
  if (n != arity_)
    throw InputError("point has " + std::to_string(n) + " coordinates, form arity is " + std::to_string(arity_));
}

namespace {

template <class Out, class In>
Out evaluate_terms(const std::vector<MonomialTerm>& terms, std::span<const In> point) {
  Out total = 0;
  for (const auto& t : terms) {
    Out mono = Out(t.coefficient);
    for (std::size_t i = 0; i < point.size(); ++i)
      if (t.exponents[i]) mono *= ipow(Out(point[i]), t.exponents[i]);
    total += mono;
  }
  return total;
}

}  // namespace

BigInt IntegerForm::evaluate(std::span<const std::int64_t> point) const {
  check_arity(point.size());
  return evaluate_terms<BigInt>(terms_, point);
}

BigInt IntegerForm::evaluate(std::span<const BigInt> point) const {
  check_arity(point.size());
  return evaluate_terms<BigInt>(terms_, point);
}

Rational IntegerForm::evaluate(std::span<const Rational> point) const {
  check_arity(point.size());
  return evaluate_terms<Rational>(terms_, point);
}

std::vector<Rational> IntegerForm::gradient(std::span<const Rational> point) const {
  check_arity(point.size());
  std::vector<Rational> grad(arity_, Rational(0));
  for (const auto& t : terms_) {
    for (std::size_t j = 0; j < arity_; ++j) {
      if (t.exponents[j] == 0) continue;
      Rational mono = Rational(t.coefficient) * t.exponents[j];
      for (std::size_t i = 0; i < arity_; ++i) {
        unsigned e = (i == j) ? t.exponents[i] - 1 : t.exponents[i];
        if (e) mono *= ipow(point[i], e);
      }
      grad[j] += mono;
    }
  }
  return grad;
}

RationalMatrix IntegerForm::gram_matrix() const {
  if (degree_ != 2) throw InputError("Gram matrix requires a quadratic form");
  RationalMatrix a(arity_, arity_);
  for (const auto& t : terms_) {
    std::vector<std::size_t> vars;
    for (std::size_t i = 0; i < arity_; ++i)
      for (unsigned e = 0; e < t.exponents[i]; ++e) vars.push_back(i);
    if (vars[0] == vars[1]) {
      a(vars[0], vars[0]) += Rational(t.coefficient);
    } else {
      Rational half = Rational(t.coefficient) / 2;
      a(vars[0], vars[1]) += half;
      a(vars[1], vars[0]) += half;
    }
  }
  return a;
}

IntegerForm IntegerForm::direct_sum(std::size_t copies) const {
  if (copies == 0) throw InputError("direct sum needs at least one copy");
  std::vector<MonomialTerm> terms;
  for (std::size_t c = 0; c < copies; ++c)
    for (const auto& t : terms_) {
      std::vector<unsigned> e(arity_ * copies, 0);
      std::copy(t.exponents.begin(), t.exponents.end(), e.begin() + static_cast<long>(c * arity_));
      terms.push_back({t.coefficient, std::move(e)});
    }
  return IntegerForm(arity_ * copies, std::move(terms));
}

RationalMatrix jacobian(std::span<const IntegerForm> block, std::span<const Rational> point) {
  RationalMatrix j(block.size(), point.size());
  for (std::size_t r = 0; r < block.size(); ++r) {
    auto g = block[r].gradient(point);
    for (std::size_t c = 0; c < g.size(); ++c) j(r, c) = g[c];
  }
  return j;
}

GradedSystem::GradedSystem(std::size_t arity, std::map<unsigned, std::vector<IntegerForm>> blocks)
    : arity_(arity), blocks_(std::move(blocks)) {
  if (arity == 0) throw InputError("system arity must be positive");
  for (auto it = blocks_.begin(); it != blocks_.end();) {
    auto& [deg, forms] = *it;
    if (deg < 2) throw InputError("system blocks must have degree >= 2");
    for (const auto& f : forms) {
      if (f.arity() != arity_) throw InputError("system block form has mismatched arity");
      if (f.degree() != deg) throw InputError("form in block " + std::to_string(deg) + " has degree " +
                                              std::to_string(f.degree()));
    }
    if (!forms.empty() && !is_linearly_independent(forms))
      throw InputError("forms of degree " + std::to_string(deg) + " are linearly dependent");
    if (forms.empty())
      it = blocks_.erase(it);
    else
      ++it;
  }
  if (blocks_.empty()) throw InputError("system has no nonlinear forms");
}

unsigned GradedSystem::max_degree() const { return blocks_.rbegin()->first; }

std::size_t GradedSystem::block_size(unsigned degree) const {
  auto it = blocks_.find(degree);
  return it == blocks_.end() ? 0 : it->second.size();
}

std::size_t GradedSystem::total_nonlinear() const {
  std::size_t r = 0;
  for (const auto& [deg, forms] : blocks_) r += forms.size();
  return r;
}

std::size_t GradedSystem::total_degree() const {
  std::size_t d = arity_;
  for (const auto& [deg, forms] : blocks_) d += deg * forms.size();
  return d;
}

std::size_t GradedSystem::max_block_size() const {
  std::size_t r = 0;
  for (const auto& [deg, forms] : blocks_) r = std::max(r, forms.size());
  return r;
}

std::vector<IntegerForm> GradedSystem::flattened() const {
  std::vector<IntegerForm> out;
  for (const auto& [deg, forms] : blocks_) out.insert(out.end(), forms.begin(), forms.end());
  return out;
}

bool is_linearly_independent(std::span<const IntegerForm> block) {
  std::vector<std::vector<unsigned>> monomials;
  for (const auto& f : block)
    for (const auto& t : f.terms()) monomials.push_back(t.exponents);
  std::sort(monomials.begin(), monomials.end());
  monomials.erase(std::unique(monomials.begin(), monomials.end()), monomials.end());
  RationalMatrix m(block.size(), monomials.size());
  for (std::size_t r = 0; r < block.size(); ++r)
    for (const auto& t : block[r].terms()) {
      auto col = std::lower_bound(monomials.begin(), monomials.end(), t.exponents) - monomials.begin();
      m(r, static_cast<std::size_t>(col)) = Rational(t.coefficient);
    }
  return m.rank() == block.size();
}

bool certify_block_rank_positive(std::span<const IntegerForm> block, std::uint64_t seed, int trials) {
  if (block.empty()) return false;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> dist(-1'000'000, 1'000'000);
  const std::size_t d = block.front().arity();
  std::vector<Rational> point(d);
  for (int t = 0; t < trials; ++t) {
    for (auto& p : point) p = Rational(dist(rng));
    if (jacobian(block, point).rank() == block.size()) return true;
  }
  return false;
}

std::string to_string(PositivityMethod m) {
  switch (m) {
    case PositivityMethod::quadratic_exact: return "quadratic-exact";
    case PositivityMethod::diagonal_exact: return "diagonal-exact";
    case PositivityMethod::user_declared: return "user-declared";
  }
  return "?";
}

namespace {

Rational certified_eigen_lower_bound(const RationalMatrix& a) {
  const std::size_t n = a.rows();
  auto shifted_psd = [&](const Rational& mu) {
    RationalMatrix b = a;
    for (std::size_t i = 0; i < n; ++i) b(i, i) -= mu;
    return b.is_positive_semidefinite();
  };
  // Gershgorin lower bound, clipped at 0 (A is already known PD)
  Rational lo = a(0, 0);
  Rational hi = a(0, 0);
  for (std::size_t i = 0; i < n; ++i) {
    Rational radius = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) radius += abs(a(i, j));
    lo = std::min(lo, Rational(a(i, i) - radius));
    hi = std::min(hi, a(i, i));
  }
  if (lo < 0) lo = 0;
  if (shifted_psd(hi)) return hi;
  for (int it = 0; it < 64; ++it) {
    Rational mid = (lo + hi) / 2;
    if (shifted_psd(mid))
      lo = mid;
    else
      hi = mid;
  }
  // prefer a short rational in [lo, hi] that still certifies
  Rational width = hi - lo;
  for (int it = 0; it < 64; ++it) {
    Rational c = simplest_between(lo, lo + width);
    if (shifted_psd(c)) return c;
    width /= 2;
  }
  return lo;
}

}  // namespace

PositivityCertificate positivity_certificate(const IntegerForm& form) {
  const std::size_t d = form.arity();
  const unsigned k = form.degree();
  if (k % 2 == 1) return {false, std::nullopt, PositivityMethod::user_declared};
  if (form.is_quadratic()) {
    RationalMatrix a = form.gram_matrix();
    if (!a.is_positive_definite()) return {false, std::nullopt, PositivityMethod::quadratic_exact};
    return {true, certified_eigen_lower_bound(a), PositivityMethod::quadratic_exact};
  }
  auto pure = form.pure_power_coefficients();
  bool has_nonpositive = std::any_of(pure.begin(), pure.end(), [](const BigInt& c) { return c <= 0; });
  if (form.is_diagonal()) {
    if (has_nonpositive) return {false, std::nullopt, PositivityMethod::diagonal_exact};
    BigInt cmin = *std::min_element(pure.begin(), pure.end());
    // sum c_i x_i^k >= c_min sum x_i^k >= c_min d^{1 - k/2} on the unit sphere
    Rational m_low = Rational(cmin) / Rational(ipow(BigInt(d), k / 2 - 1));
    return {true, m_low, PositivityMethod::diagonal_exact};
  }
  // Q(e_i) <= 0 disproves definiteness; otherwise nothing is certified.
  if (has_nonpositive) return {false, std::nullopt, PositivityMethod::user_declared};
  return {std::nullopt, std::nullopt, PositivityMethod::user_declared};
}

PositivityCertificate declare_positive_definite(Rational m_low) {
  if (m_low <= 0) throw InputError("declared m_low must be positive");
  return {true, std::move(m_low), PositivityMethod::user_declared};
}

QuadraticRank birch_rank_quadratic(const IntegerForm& form) {
  if (!form.is_quadratic())
    throw InputError("exact Birch rank is only available for quadratic forms; declare it for higher degree");
  std::size_t r = form.gram_matrix().rank();
  return {r, form.arity() - r};
}

DirectSumRankCheck direct_sum_rank_check(const IntegerForm& form, std::size_t copies) {
  std::size_t single = birch_rank_quadratic(form).birch_rank;
  std::size_t sum = birch_rank_quadratic(form.direct_sum(copies)).birch_rank;
  return {sum, copies * single, sum >= copies * single};
}

Rational chi_constant(unsigned i, std::size_t r_i, std::size_t R, unsigned k) {
  return Rational(BigInt(i - 1) * ipow(BigInt(2), 3 * i) * BigInt(r_i) * BigInt(R) * BigInt(k));
}

HypersurfaceParams hypersurface_params(std::size_t arity, unsigned degree, long singular_dimension,
                                       ValueSource source) {
  if (degree < 2) throw InputError("parameter report requires degree >= 2");
  const long d = static_cast<long>(arity);
  const long k = degree;
  const BigInt two_k = ipow(BigInt(2), degree);
  HypersurfaceParams p;
  p.singular_dimension = singular_dimension;
  p.singular_dimension_source = source;
  const Rational codim(d - singular_dimension);
  p.kappa = codim / Rational(ipow(BigInt(2), degree - 1) * (k - 1));
  Rational birch_ratio = codim / Rational(BigInt(k - 1) * two_k);
  p.gamma = (birch_ratio - 1) / Rational(6 * k);
  p.birch_criterion_holds = codim > Rational(BigInt(k - 1) * two_k);
  if (d > k) p.p_critical = Rational(2 * d, d - k);
  if (p.gamma > 0) p.threshold_main = 2 + Rational(2 * k) / p.gamma;
  if (p.kappa > 2) p.threshold_major_arcs = 2 + Rational(4) / (p.kappa - 2);
  return p;
}

std::optional<long> computable_singular_dimension(const IntegerForm& form) {
  if (form.is_quadratic()) return static_cast<long>(birch_rank_quadratic(form).singular_dimension);
  if (form.is_diagonal()) {
    auto pure = form.pure_power_coefficients();
    return static_cast<long>(std::count(pure.begin(), pure.end(), BigInt(0)));
  }
  return std::nullopt;
}

Rational ParamReport::birch_even_bound(const BlockParams& block, std::size_t s) const {
  return (block.chi + Rational(BigInt((block.count + 1) * arity))) / Rational(BigInt(block.count + s));
}

std::vector<std::optional<bool>> ParamReport::birch_even_ok(std::size_t s) const {
  std::vector<std::optional<bool>> out;
  for (const auto& b : blocks) {
    if (b.unconstrained())
      out.emplace_back(true);
    else if (!b.birch_rank)
      out.emplace_back(std::nullopt);
    else
      out.emplace_back(Rational(*b.birch_rank) >= birch_even_bound(b, s));
  }
  return out;
}

namespace {

ParamReport system_skeleton(std::size_t arity, unsigned k, const std::map<unsigned, std::size_t>& counts) {
  ParamReport rep;
  rep.arity = arity;
  rep.degree = k;
  rep.total_nonlinear = 0;
  rep.total_degree = arity;
  rep.max_block = 0;
  for (const auto& [deg, r] : counts) {
    rep.total_nonlinear += r;
    rep.total_degree += deg * r;
    rep.max_block = std::max(rep.max_block, r);
  }
  for (unsigned i = 2; i <= k; ++i) {
    auto it = counts.find(i);
    std::size_t r = it == counts.end() ? 0 : it->second;
    BlockParams b;
    b.degree = i;
    b.count = r;
    b.chi = chi_constant(i, r, rep.total_nonlinear, k);
    b.birch_rank_source = r == 0 ? ValueSource::computed : ValueSource::unknown;
    rep.blocks.push_back(std::move(b));
  }
  return rep;
}

}  // namespace

ParamReport parameter_report(const IntegerForm& form, std::optional<long> declared_singular_dimension) {
  if (form.degree() < 2) throw InputError("parameter report requires degree >= 2");
  auto computed = computable_singular_dimension(form);
  long dim;
  ValueSource source;
  if (computed) {
    if (declared_singular_dimension && *declared_singular_dimension != *computed)
      throw InputError("declared singular-locus dimension " + std::to_string(*declared_singular_dimension) +
                       " disagrees with the exact value " + std::to_string(*computed));
    dim = *computed;
    source = ValueSource::computed;
  } else if (declared_singular_dimension) {
    dim = *declared_singular_dimension;
    source = ValueSource::user_declared;
  } else {
    throw InputError("singular-locus dimension is not computable for this form; supply it explicitly");
  }
  if (dim < 0 || dim > static_cast<long>(form.arity())) throw InputError("singular-locus dimension out of range");

  ParamReport rep = system_skeleton(form.arity(), form.degree(), {{form.degree(), 1}});
  rep.hypersurface = hypersurface_params(form.arity(), form.degree(), dim, source);
  auto& block = rep.blocks.back();
  block.birch_rank = static_cast<long>(form.arity()) - dim;
  block.birch_rank_source = source;
  block.rank_at_least_one_certified = *block.birch_rank >= 1;
  return rep;
}

ParamReport parameter_report(const GradedSystem& system, const std::map<unsigned, long>& declared_ranks,
                             std::uint64_t seed) {
  std::map<unsigned, std::size_t> counts;
  for (const auto& [deg, forms] : system.blocks()) counts[deg] = forms.size();
  ParamReport rep = system_skeleton(system.arity(), system.max_degree(), counts);
  for (auto& b : rep.blocks) {
    if (b.unconstrained()) continue;
    const auto& forms = system.blocks().at(b.degree);
    std::optional<long> exact;
    if (forms.size() == 1) {
      if (auto dim = computable_singular_dimension(forms.front()))
        exact = static_cast<long>(system.arity()) - *dim;
    }
    auto declared = declared_ranks.find(b.degree);
    if (exact) {
      if (declared != declared_ranks.end() && declared->second != *exact)
        throw InputError("declared Birch rank for degree " + std::to_string(b.degree) +
                         " disagrees with the exact value " + std::to_string(*exact));
      b.birch_rank = exact;
      b.birch_rank_source = ValueSource::computed;
      b.rank_at_least_one_certified = *exact >= 1;
    } else {
      if (declared != declared_ranks.end()) {
        b.birch_rank = declared->second;
        b.birch_rank_source = ValueSource::user_declared;
      }
      b.rank_at_least_one_certified = certify_block_rank_positive(forms, seed + b.degree);
    }
  }
  return rep;
}

}  // namespace restrictlab
