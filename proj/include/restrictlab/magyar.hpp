#pragma once

#include "restrictlab/expsums.hpp"
#include "restrictlab/lattice.hpp"
#include "restrictlab/surface.hpp"

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

namespace restrictlab {

// Number of dyadic shells: ceiling takes the smallest S with 2^{Sk} >= lambda,
// floor the largest S with 2^{Sk} <= lambda.
enum class Truncation { ceiling, floor };

int shell_limit(std::int64_t lambda, unsigned k, Truncation rule = Truncation::ceiling);
// R_s = {a/q : 2^s <= q < 2^{s+1}, a in U_q}.
std::vector<FractionAQ> fraction_shell(int s);

// G(a, q; m) with per-fraction caching (1-D factors for diagonal forms, DFT tables otherwise).
class GaussSumCache {
 public:
  explicit GaussSumCache(IntegerForm form, std::uint64_t budget = default_budget());
  Complex operator()(const FractionAQ& f, std::span<const std::int64_t> m) const;

 private:
  IntegerForm form_;
  std::uint64_t budget_;
  std::vector<std::int64_t> diagonal_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::vector<Complex>>> factors_;
  mutable std::map<std::pair<std::int64_t, std::int64_t>, WeylSumTable> tables_;
};

class MagyarDecomposition {
 public:
  MagyarDecomposition(IntegerForm form, StarQuadrature quadrature, Truncation truncation = Truncation::ceiling,
                      std::size_t threads = 1);

  const IntegerForm& form() const { return form_; }
  const StarQuadrature& quadrature() const { return quad_; }
  Truncation truncation() const { return truncation_; }

  // mu^{a/q}(xi) = sum_m G(a,q;m) Psi(2^s (xi - m/q)) hat sigma(lambda^{1/k} (xi - m/q)), s = floor(log2 q).
  Complex multiplier(std::int64_t lambda, const FractionAQ& f, std::span<const double> xi) const;
  // Same with Psi(2^s .) replaced by the piece Psi_j(2^s .) of the partition with j_max pieces.
  Complex multiplier_piece(std::int64_t lambda, const FractionAQ& f, int j, int j_max, std::span<const double> xi) const;

  // sum_{s <= S} sum_{q in shell s} sum_{a in U_q} e(-a lambda / q) mu^{a/q}(xi)
  Complex main_term(std::int64_t lambda, std::span<const double> xi) const;
  // lambda^{1 - d/k} sum_{Q(x) = lambda} e(x . xi)
  Complex scaled_extension(const LatticeSolutionSet& set, std::span<const double> xi) const;
  Complex error_term(const LatticeSolutionSet& set, std::span<const double> xi) const;

 private:
  Complex evaluate(std::int64_t lambda, const FractionAQ& f, std::span<const double> xi,
                   const std::function<double(std::span<const double>)>& window) const;

  IntegerForm form_;
  StarQuadrature quad_;
  Truncation truncation_;
  std::size_t threads_;
  GaussSumCache gauss_;
  // hat sigma is often requested at repeated arguments (every fraction at xi = m/q hits 0)
  mutable std::mutex sigma_mutex_;
  mutable std::map<std::vector<double>, Complex> sigma_memo_;
  Complex sigma(const std::vector<double>& arg) const;
};

struct MinorArcRow {
  std::int64_t lambda;
  double sup_error;                 // sup over the sample of |eps_lambda(xi)|
  std::size_t argmax = 0;           // sample index attaining it
  double scaled_count;              // lambda^{1 - d/k} N_Q(lambda)
  double decay_reference;           // lambda^{-gamma}
  std::optional<double> quadrature_error;
  bool quadrature_dominated = false;
};

struct MinorArcReport {
  std::vector<MinorArcRow> rows;
  std::optional<double> slope;     // log sup vs log lambda; absent with fewer than two rows
  std::optional<double> spearman;  // rank correlation of sup vs lambda
  bool warning = false;
};

struct MinorArcOptions {
  const MagyarDecomposition* reference = nullptr;  // second quadrature for the error estimate
  std::size_t threads = 1;
};

MinorArcReport minor_arc_report(const MagyarDecomposition& decomposition, const PositivityCertificate& certificate,
                                std::span<const std::int64_t> lambdas, const std::vector<std::vector<double>>& xis,
                                const Rational& gamma, const MinorArcOptions& options = {});

double spearman_correlation(std::span<const double> x, std::span<const double> y);

struct KernelCheckOptions {
  int j_max = 4;
  std::size_t grid = 256;  // torus samples per axis for the inverse transform
  double radius = 2.0;     // compare on |x| <= radius * lambda^{1/k}
};

struct KernelCheck {
  double max_discrepancy = 0;    // max |path (i) - path (ii)|
  double aliasing_estimate = 0;  // from path (ii) evaluated at the nearest grid images
  double error_estimate = 0;     // aliasing + roundoff floor
  double max_kernel = 0;
  double max_phase_error = 0;    // |ratio of paths - e(aQ(x)/q)| where the kernel is not negligible
  std::size_t points = 0;
  bool within_estimate() const { return max_discrepancy <= error_estimate; }
};

// Compares (i) the inverse DFT of lambda^{d/k-1} mu^{a/q,j} on a torus grid against
// (ii) lambda^{d/k-1} e(aQ(x)/q) int hat Phi_j(x - lambda^{1/k} y) dsigma(y) by node sums,
// where Phi_j = Psi_j(2^s .) and hat Phi_j is a difference of tensor products of hat chi.
KernelCheck kernel_identity_check(const MagyarDecomposition& decomposition, std::int64_t lambda, const FractionAQ& f,
                                  int j, const KernelCheckOptions& options = {});

std::string to_string(Truncation t);

}  // namespace restrictlab
