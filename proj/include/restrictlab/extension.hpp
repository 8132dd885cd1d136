#pragma once

#include "restrictlab/expsums.hpp"
#include "restrictlab/forms.hpp"
#include "restrictlab/lattice.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace restrictlab {

enum class WeightKind { explicit_map, indicator_box, smooth_cutoff };

// a : Z^d -> C with finite support.
class WeightFunction {
 public:
  static WeightFunction indicator_box(std::int64_t N);
  // psi(n/N) with psi = 1 on [-1, 1]^d and support inside (-2, 2)^d.
  static WeightFunction smooth_cutoff(std::int64_t N);
  static WeightFunction explicit_map(std::map<std::vector<std::int64_t>, Complex> values);

  WeightKind kind() const { return kind_; }
  std::int64_t scale() const { return N_; }
  // Every n with a(n) != 0 has max |n_i| <= support_bound().
  std::int64_t support_bound() const;
  const std::map<std::vector<std::int64_t>, Complex>& entries() const { return entries_; }

  Complex operator()(std::span<const std::int64_t> n) const;
  // Exact value for the box and cutoff kinds.
  Rational exact(std::span<const std::int64_t> n) const;

 private:
  WeightKind kind_ = WeightKind::indicator_box;
  std::int64_t N_ = 0;
  std::int64_t bound_ = 0;
  std::map<std::vector<std::int64_t>, Complex> entries_;
};

// Unit-modulus phases drawn from a seeded generator on the given points
// (flat, `dim` coordinates each), normalized to l^2 norm 1.
WeightFunction random_phase_weights(std::size_t dim, std::span<const std::int64_t> points, std::uint64_t seed);

// Values of a trigonometric polynomial at xi = (j_1/G_1, ..., j_m/G_m), row-major.
struct TorusGridFunction {
  std::vector<std::size_t> sizes;
  std::vector<Complex> values;
  std::vector<std::int64_t> frequency_bounds;  // |frequency_i| <= M_i
  std::vector<std::int64_t> spans;             // max - min of the occurring frequencies per axis
  bool aliased = false;                        // some G_i <= span_i

  std::size_t volume() const { return values.size(); }
  // Largest l with G_i > l * span_i on every axis: the grid mean of |E|^{2l} is then exact.
  std::uint64_t exact_even_order() const;
};

struct GridOptions {
  std::uint64_t budget = default_budget();
  std::size_t threads = 1;
  // Used when sizes are chosen automatically: the grid is exact for moments up to this order.
  unsigned moment_order = 2;
};

// Smallest even G_i with G_i > l * span_i.
std::vector<std::size_t> exact_grid_sizes(std::span<const std::int64_t> spans, unsigned l);

// E_lambda a on the grid; empty `sizes` selects exact_grid_sizes for options.moment_order.
TorusGridFunction grid_eval_hypersurface(const LatticeSolutionSet& set, const WeightFunction& weights,
                                         std::vector<std::size_t> sizes = {}, const GridOptions& options = {});

// E_N a on the (d + R)-dimensional grid, phase n.xi + Q(n).alpha. The weight's
// support (box |n_i| <= N, |n_i| <= 2N - 1 for the cutoff, or the explicit map) fixes the sum.
TorusGridFunction grid_eval_graph(const GradedSystem& system, const WeightFunction& weights,
                                  std::vector<std::size_t> sizes = {}, const GridOptions& options = {});

struct LpNorm {
  double value = 0;
  double power_mean = 0;                // grid mean of |E|^p (max modulus for p = inf)
  std::optional<double> error_estimate;  // two-grid difference; absent without an even axis
  bool exact = false;                    // even p on a grid that is exact for it
};

// p in [1, inf]; infinity selects the max modulus.
LpNorm lp_norm(const TorusGridFunction& grid, double p);

struct EvenMoment {
  std::optional<Rational> exact;  // for box and cutoff weights
  double value = 0;
};

// int |E a|^{2l} = sum_t |h^{*l}(t)|^2 with h the weight pushed forward to the keys.
EvenMoment even_moment_exact(const GradedSystem& system, const WeightFunction& weights, unsigned l,
                             const GridOptions& options = {});
EvenMoment even_moment_exact(const LatticeSolutionSet& set, const WeightFunction& weights, unsigned l,
                             const GridOptions& options = {});

// sum |a(n)|^2 over the support of a (restricted to the solution set for hypersurfaces).
double l2_norm_squared(const GradedSystem& system, const WeightFunction& weights);
double l2_norm_squared(const LatticeSolutionSet& set, const WeightFunction& weights);

struct RatioPolicy {
  bool uniform = true;             // a = 1 (on the level set, or the box |n_i| <= N)
  std::size_t random_draws = 2;    // seeded unit-modulus phase weights
  std::uint64_t seed = 1;
  double error_tolerance = 0.01;   // flag when the grid error exceeds this fraction of the norm
  std::uint64_t budget = default_budget();
  std::size_t threads = 1;
};

struct RatioRow {
  std::int64_t scale;    // lambda or N
  double p;
  std::string weights;   // "uniform" or "random:<i>"
  double norm;
  double bound;          // bound expression times ||a||_2
  double ratio;
  double running_max;    // max ratio so far for this (p, weights)
  std::optional<double> error_estimate;
  bool flagged = false;
};

struct RatioTrend {
  double p;
  double max_ratio;
  std::optional<double> slope;  // log max-over-weights ratio against log scale
};

struct RatioReport {
  std::vector<RatioRow> rows;
  std::vector<RatioTrend> trends;
  std::size_t flagged = 0;
  std::vector<std::int64_t> skipped;  // scales with an empty level set
};

// Bound (1 + lambda^{(d-k)/(2k) - d/(kp)}) ||a||_2 over lambda in [lambda_lo, lambda_hi].
RatioReport ratio_report_hypersurface(const IntegerForm& form, const PositivityCertificate& certificate,
                                      std::int64_t lambda_lo, std::int64_t lambda_hi, std::span<const double> ps,
                                      const RatioPolicy& policy = {});
// Bound N^{d/2 - D/p} ||a||_2 over N in [N_lo, N_hi].
RatioReport ratio_report_graph(const GradedSystem& system, std::int64_t N_lo, std::int64_t N_hi,
                               std::span<const double> ps, const RatioPolicy& policy = {});

}  // namespace restrictlab
