#pragma once

#include "restrictlab/forms.hpp"
#include "restrictlab/histogram.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace restrictlab {

// Integer points of {Q = lambda}, stored flat in ascending lexicographic order.
class LatticeSolutionSet {
 public:
  LatticeSolutionSet(IntegerForm form, std::int64_t lambda, std::vector<std::int64_t> coords);

  const IntegerForm& form() const { return form_; }
  std::int64_t lambda() const { return lambda_; }
  std::size_t arity() const { return form_.arity(); }
  std::size_t size() const { return coords_.size() / arity(); }
  bool empty() const { return coords_.empty(); }
  std::span<const std::int64_t> point(std::size_t i) const { return {coords_.data() + i * arity(), arity()}; }
  const std::vector<std::int64_t>& flat() const { return coords_; }
  // max_i |x_i| over all points (0 when empty)
  std::int64_t coordinate_bound() const;

 private:
  IntegerForm form_;
  std::int64_t lambda_;
  std::vector<std::int64_t> coords_;
};

struct EnumerationOptions {
  std::size_t threads = 1;
};

// Complete list of x with Q(x) = lambda; the certificate bounds the search region.
LatticeSolutionSet enumerate_level_set(const IntegerForm& form, const PositivityCertificate& certificate,
                                       std::int64_t lambda, const EnumerationOptions& options = {});

struct CountEntry {
  std::int64_t lambda;
  std::uint64_t count;                    // N_Q(lambda)
  std::optional<double> normalized;       // N_Q(lambda) * lambda^{1 - d/k}, absent at lambda = 0
};

struct CountSeries {
  std::vector<CountEntry> entries;
};

CountSeries count_series(const IntegerForm& form, const PositivityCertificate& certificate, std::int64_t lambda_lo,
                         std::int64_t lambda_hi, const EnumerationOptions& options = {});

// Integer radius bound r with Q(x) <= lambda => |x|^2 <= r (certificate-derived).
std::int64_t squared_radius_bound(const PositivityCertificate& certificate, unsigned degree, std::int64_t lambda);

struct BoxCountOptions {
  std::uint64_t budget = default_budget();
  std::size_t threads = 1;
};

struct BoxCount {
  ValueHistogram histogram;            // t -> #{n in box : Q_blocks(n) = t}
  std::uint64_t sup = 0;
  std::vector<std::int64_t> argmax;
  std::uint64_t box_points = 0;
};

// Full histogram over the box |n_i| <= N of the nonlinear value map of the system.
BoxCount box_system_count(const GradedSystem& system, std::int64_t N, const BoxCountOptions& options = {});
// Single count for a target t in Z^R.
std::uint64_t box_system_count(const GradedSystem& system, std::int64_t N, std::span<const std::int64_t> target,
                               const BoxCountOptions& options = {});

enum class CutoffKind { indicator, smooth };

// Value map n -> (n, Q^(2)(n), ..., Q^(k)(n)) on the box |n_i| <= N (indicator)
// or |n_i| <= 2N (smooth cutoff support). Each n lands on its own key.
ValueHistogram graph_value_histogram(const GradedSystem& system, std::int64_t N, const BoxCountOptions& options = {});

// Exact smooth-cutoff weights psi(n/N), scaled to integers by a common denominator.
struct ScaledWeights {
  WeightedHistogram histogram;
  BigInt denominator;
};
ScaledWeights graph_smooth_weights(const GradedSystem& system, std::int64_t N, const BoxCountOptions& options = {});

struct MomentCount {
  Rational sup;              // sup_t h^{*l}(t)
  std::vector<std::int64_t> argmax;
  Rational sum_of_squares;   // sum_t h^{*l}(t)^2 = int |E|^{2l}
  std::size_t support = 0;   // number of t with h^{*l}(t) != 0
  std::uint64_t box_points = 0;
};

MomentCount moment_count(const GradedSystem& system, std::int64_t N, unsigned l, CutoffKind cutoff,
                         const BoxCountOptions& options = {});

// Same quantities for an arbitrary unit-weight histogram.
MomentCount moment_from_histogram(const ValueHistogram& h, unsigned l, const ConvolutionOptions& options = {});
MomentCount moment_from_histogram(const ScaledWeights& w, unsigned l, const ConvolutionOptions& options = {});

}  // namespace restrictlab
