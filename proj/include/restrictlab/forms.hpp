#pragma once

#include "restrictlab/numeric.hpp"
#include "restrictlab/rational_matrix.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace restrictlab {

struct MonomialTerm {
  BigInt coefficient;
  std::vector<unsigned> exponents;

  unsigned total_degree() const;
  bool operator==(const MonomialTerm&) const = default;
};

// Homogeneous polynomial with integer coefficients in `arity` variables.
// Terms are kept sorted by exponent vector (ascending lexicographic), with
// duplicates merged and zero coefficients dropped.
class IntegerForm {
 public:
  IntegerForm(std::size_t arity, std::vector<MonomialTerm> terms);

  // c_1 x_1^k + ... + c_d x_d^k; all c_i = 1 when `coefficients` is empty.
  static IntegerForm diagonal(std::size_t arity, unsigned degree, std::vector<BigInt> coefficients = {});

  std::size_t arity() const { return arity_; }
  unsigned degree() const { return degree_; }
  const std::vector<MonomialTerm>& terms() const { return terms_; }

  bool is_quadratic() const { return degree_ == 2; }
  // Every term is a pure power c x_i^k.
  bool is_diagonal() const;
  // Coefficient of x_i^k for each i (zero when absent).
  std::vector<BigInt> pure_power_coefficients() const;

  BigInt evaluate(std::span<const std::int64_t> point) const;
  BigInt evaluate(std::span<const BigInt> point) const;
  Rational evaluate(std::span<const Rational> point) const;

  std::vector<Rational> gradient(std::span<const Rational> point) const;

  // Symmetric Gram matrix A with Q(x) = x^T A x. Degree must be 2.
  RationalMatrix gram_matrix() const;

  // Q(n^(1)) + ... + Q(n^(s)) in s * arity variables.
  IntegerForm direct_sum(std::size_t copies) const;

  bool operator==(const IntegerForm&) const = default;

 private:
  void check_arity(std::size_t n) const;

  std::size_t arity_;
  unsigned degree_;
  std::vector<MonomialTerm> terms_;
};

RationalMatrix jacobian(std::span<const IntegerForm> block, std::span<const Rational> point);

// Graded family Q^(2), ..., Q^(k); blocks keyed by degree.
class GradedSystem {
 public:
  GradedSystem(std::size_t arity, std::map<unsigned, std::vector<IntegerForm>> blocks);

  std::size_t arity() const { return arity_; }
  const std::map<unsigned, std::vector<IntegerForm>>& blocks() const { return blocks_; }
  unsigned max_degree() const;

  std::size_t block_size(unsigned degree) const;
  std::size_t total_nonlinear() const;  // R = r_2 + ... + r_k
  std::size_t total_degree() const;     // D = d + 2 r_2 + ... + k r_k
  std::size_t max_block_size() const;   // r_Q

  // All nonlinear forms in degree order (the R coordinates of the value map).
  std::vector<IntegerForm> flattened() const;

 private:
  std::size_t arity_;
  std::map<unsigned, std::vector<IntegerForm>> blocks_;
};

// Linear independence over Q, by exact rank of the monomial-coefficient matrix.
bool is_linearly_independent(std::span<const IntegerForm> block);

// Samples integer points with entries in [-10^6, 10^6] and reports whether one
// of `trials` points gives a full-rank Jacobian (which certifies B >= 1).
bool certify_block_rank_positive(std::span<const IntegerForm> block, std::uint64_t seed, int trials = 64);

enum class PositivityMethod { quadratic_exact, diagonal_exact, user_declared };

struct PositivityCertificate {
  std::optional<bool> positive_definite;  // nullopt: unverified
  std::optional<Rational> m_low;          // lower bound for min_{|x|=1} Q(x)
  PositivityMethod method = PositivityMethod::user_declared;

  bool usable() const { return positive_definite.value_or(false) && m_low && *m_low > 0; }
};

PositivityCertificate positivity_certificate(const IntegerForm& form);
PositivityCertificate declare_positive_definite(Rational m_low);

std::string to_string(PositivityMethod m);

struct QuadraticRank {
  std::size_t birch_rank;         // rank of the Gram matrix
  std::size_t singular_dimension;  // d - rank
};

QuadraticRank birch_rank_quadratic(const IntegerForm& form);

struct DirectSumRankCheck {
  std::size_t direct_sum_rank;  // B(Q^{s+})
  std::size_t scaled_rank;      // s * B(Q)
  bool holds;                   // direct_sum_rank >= scaled_rank
};

DirectSumRankCheck direct_sum_rank_check(const IntegerForm& form, std::size_t copies);

enum class ValueSource { computed, user_declared, unknown };

struct HypersurfaceParams {
  long singular_dimension;
  ValueSource singular_dimension_source;
  Rational kappa;
  Rational gamma;
  bool birch_criterion_holds;
  std::optional<Rational> p_critical;           // 2d/(d-k), when d > k
  std::optional<Rational> threshold_main;        // 2 + 2k/gamma, when gamma > 0
  std::optional<Rational> threshold_major_arcs;  // 2 + 4/(kappa - 2), when kappa > 2
};

struct BlockParams {
  unsigned degree;
  std::size_t count;  // r_i
  Rational chi;       // (i-1) 2^{3i} r_i R k
  // Birch rank B_i; nullopt with count == 0 means "unconstrained" (infinite).
  std::optional<long> birch_rank;
  ValueSource birch_rank_source;
  bool rank_at_least_one_certified = false;

  bool unconstrained() const { return count == 0; }
};

struct ParamReport {
  std::size_t arity;
  unsigned degree;  // k
  std::optional<HypersurfaceParams> hypersurface;
  std::size_t total_nonlinear;  // R
  std::size_t total_degree;     // D
  std::size_t max_block;        // r_Q
  std::vector<BlockParams> blocks;  // degrees 2..k

  // Right-hand side (chi + (r_i + 1) d) / (r_i + s) for one block.
  Rational birch_even_bound(const BlockParams& block, std::size_t s) const;
  // Per-block verdicts; nullopt where the rank is unknown.
  std::vector<std::optional<bool>> birch_even_ok(std::size_t s) const;
  // p >= 2 (r_Q + s)
  std::size_t moment_exponent_threshold(std::size_t s) const { return 2 * (max_block + s); }
};

Rational chi_constant(unsigned i, std::size_t r_i, std::size_t R, unsigned k);

HypersurfaceParams hypersurface_params(std::size_t arity, unsigned degree, long singular_dimension,
                                       ValueSource source);

// Singular-locus dimension for quadratic and diagonal forms; nullopt otherwise.
std::optional<long> computable_singular_dimension(const IntegerForm& form);

ParamReport parameter_report(const IntegerForm& form, std::optional<long> declared_singular_dimension = {});
ParamReport parameter_report(const GradedSystem& system, const std::map<unsigned, long>& declared_ranks = {},
                             std::uint64_t seed = 1);

}  // namespace restrictlab
