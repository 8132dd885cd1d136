#include "restrictlab/lattice.hpp"

#include "restrictlab/bump.hpp"
#include "restrictlab/compiled_form.hpp"
#include "restrictlab/parallel.hpp"

#include <boost/integer/common_factor.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace restrictlab {

BigInt sum_of_squares(const ValueHistogram& h) {
  unsigned __int128 acc = 0;
  BigInt big = 0;
  for (auto v : h.values()) {
    unsigned __int128 sq = static_cast<unsigned __int128>(v) * v;
    if (acc > ~static_cast<unsigned __int128>(0) - sq) {
      big += BigInt(static_cast<std::uint64_t>(acc >> 64)) << 64;
      big += BigInt(static_cast<std::uint64_t>(acc));
      acc = 0;
    }
    acc += sq;
  }
  big += BigInt(static_cast<std::uint64_t>(acc >> 64)) << 64;
  big += BigInt(static_cast<std::uint64_t>(acc));
  return big;
}

BigInt sum_of_squares(const WeightedHistogram& h) {
  BigInt acc = 0;
  for (const auto& v : h.values()) acc += v * v;
  return acc;
}

double sum_of_squares(const ComplexHistogram& h) {
  double acc = 0;
  for (const auto& v : h.values()) acc += std::norm(v);
  return acc;
}

LatticeSolutionSet::LatticeSolutionSet(IntegerForm form, std::int64_t lambda, std::vector<std::int64_t> coords)
    : form_(std::move(form)), lambda_(lambda), coords_(std::move(coords)) {
  if (coords_.size() % form_.arity() != 0) throw std::invalid_argument("solution coordinates not a multiple of arity");
}

std::int64_t LatticeSolutionSet::coordinate_bound() const {
  std::int64_t b = 0;
  for (auto c : coords_) b = std::max(b, c < 0 ? -c : c);
  return b;
}

namespace {

std::int64_t iroot64(std::int64_t n, unsigned k) {
  if (n <= 0) return 0;
  if (k == 1) return n;
  auto r = static_cast<std::int64_t>(std::pow(static_cast<double>(n), 1.0 / k));
  auto pow_le = [&](std::int64_t b) {
    __int128 p = 1;
    for (unsigned i = 0; i < k; ++i) {
      p *= b;
      if (p > n) return false;
    }
    return true;
  };
  while (r > 0 && !pow_le(r)) --r;
  while (pow_le(r + 1)) ++r;
  return r;
}

std::int64_t ipow64(std::int64_t b, unsigned k) {
  std::int64_t p = 1;
  for (unsigned i = 0; i < k; ++i) p *= b;
  return p;
}

std::int64_t horner(std::span<const std::int64_t> coeffs, std::int64_t t) {
  std::int64_t v = 0;
  for (std::size_t i = coeffs.size(); i-- > 0;) v = v * t + coeffs[i];
  return v;
}

void require_usable(const PositivityCertificate& certificate) {
  if (!certificate.usable())
    throw InputError("enumeration needs a positive-definite certificate with m_low > 0 (verified or declared)");
}

std::vector<std::int64_t> positive_diagonal(const IntegerForm& form) {
  if (!form.is_diagonal()) return {};
  std::vector<std::int64_t> c;
  for (const auto& v : form.pure_power_coefficients()) {
    if (v <= 0) return {};
    c.push_back(to_int64(v));
  }
  return c;
}

// Bound on |x_0| over the scanned region {Q <= hi}.
std::int64_t first_coordinate_bound(const IntegerForm& form, const PositivityCertificate& certificate,
                                    std::int64_t hi) {
  const auto diag = positive_diagonal(form);
  if (!diag.empty()) return iroot64(hi / diag[0], form.degree());
  return static_cast<std::int64_t>(iroot_floor(BigInt(squared_radius_bound(certificate, form.degree(), hi)), 2));
}

// Visits every integer point of the region {Q <= limit} (superset via the certificate),
// calling emit(x, value) for points with lo <= Q(x) <= hi. Slabs over the first
// coordinate run in parallel; emit receives the slab index so callers can keep
// per-slab outputs and concatenate them in order.
template <class Emit>
void scan_region(const IntegerForm& form, const PositivityCertificate& certificate, std::int64_t lo, std::int64_t hi,
                 std::size_t threads, Emit&& emit) {
  const std::size_t d = form.arity();
  const unsigned k = form.degree();
  const std::int64_t radius_sq = squared_radius_bound(certificate, k, hi);
  const auto diag = positive_diagonal(form);
  const std::int64_t b0 = first_coordinate_bound(form, certificate, hi);
  const std::size_t slab_count = static_cast<std::size_t>(2 * b0 + 1);
  CompiledForm compiled(form, b0 > 0 ? b0 : 1);

  parallel_chunks(threads, slab_count, [&](std::size_t, std::size_t s_begin, std::size_t s_end) {
    std::vector<std::int64_t> x(d), poly(k + 1);
    if (!diag.empty()) {
      // partial value P = sum_{j<i} c_j x_j^k; coordinate bound from the remaining budget
      auto rec = [&](auto&& self, std::size_t i, std::int64_t partial) -> void {
        const std::int64_t room = hi - partial;
        if (room < 0) return;
        const std::int64_t b = iroot64(room / diag[i], k);
        for (std::int64_t t = -b; t <= b; ++t) {
          x[i] = t;
          const std::int64_t v = partial + diag[i] * ipow64(t, k);
          if (i + 1 == d) {
            if (v >= lo && v <= hi) emit(static_cast<std::size_t>(x[0] + b0), std::span<const std::int64_t>(x), v);
          } else {
            self(self, i + 1, v);
          }
        }
      };
      for (std::size_t s = s_begin; s < s_end; ++s) {
        x[0] = static_cast<std::int64_t>(s) - b0;
        const std::int64_t v = diag[0] * ipow64(x[0], k);
        if (d == 1) {
          if (v >= lo && v <= hi) emit(s, std::span<const std::int64_t>(x), v);
        } else if (v <= hi) {
          rec(rec, 1, v);
        }
      }
      return;
    }
    // general form: Euclidean ball |x|^2 <= radius_sq, exact polynomial in the last coordinate
    auto leaf = [&](std::size_t slab, std::int64_t norm_sq) {
      const std::int64_t b = static_cast<std::int64_t>(iroot_floor(BigInt(radius_sq - norm_sq), 2));
      compiled.last_coordinate_polynomial(std::span<const std::int64_t>(x.data(), d - 1), poly);
      for (std::int64_t t = -b; t <= b; ++t) {
        const std::int64_t v = horner(poly, t);
        if (v >= lo && v <= hi) {
          x[d - 1] = t;
          emit(slab, std::span<const std::int64_t>(x), v);
        }
      }
    };
    auto rec = [&](auto&& self, std::size_t slab, std::size_t i, std::int64_t norm_sq) -> void {
      if (i + 1 == d) {
        leaf(slab, norm_sq);
        return;
      }
      const std::int64_t b = static_cast<std::int64_t>(iroot_floor(BigInt(radius_sq - norm_sq), 2));
      for (std::int64_t t = -b; t <= b; ++t) {
        x[i] = t;
        self(self, slab, i + 1, norm_sq + t * t);
      }
    };
    for (std::size_t s = s_begin; s < s_end; ++s) {
      const std::int64_t t0 = static_cast<std::int64_t>(s) - b0;
      if (d == 1) {
        x[0] = t0;
        const std::int64_t v = compiled(std::span<const std::int64_t>(x));
        if (v >= lo && v <= hi) emit(s, std::span<const std::int64_t>(x), v);
        continue;
      }
      x[0] = t0;
      rec(rec, s, 1, t0 * t0);
    }
  });
}

}  // namespace

std::int64_t squared_radius_bound(const PositivityCertificate& certificate, unsigned degree, std::int64_t lambda) {
  require_usable(certificate);
  if (degree % 2 != 0) throw InputError("positive definite forms have even degree");
  if (lambda < 0) return -1;
  return to_int64(max_base_with_power_below(Rational(lambda), *certificate.m_low, degree / 2));
}

LatticeSolutionSet enumerate_level_set(const IntegerForm& form, const PositivityCertificate& certificate,
                                       std::int64_t lambda, const EnumerationOptions& options) {
  require_usable(certificate);
  if (lambda < 0) return LatticeSolutionSet(form, lambda, {});
  // one output buffer per first-coordinate slab, concatenated in order
  const std::int64_t b0 = first_coordinate_bound(form, certificate, lambda);
  std::vector<std::vector<std::int64_t>> slabs(static_cast<std::size_t>(2 * b0 + 1));
  std::vector<std::int64_t> coords;
  scan_region(form, certificate, lambda, lambda, options.threads,
              [&](std::size_t slab, std::span<const std::int64_t> x, std::int64_t) {
                slabs[slab].insert(slabs[slab].end(), x.begin(), x.end());
              });
  for (auto& s : slabs) coords.insert(coords.end(), s.begin(), s.end());
  return LatticeSolutionSet(form, lambda, std::move(coords));
}

CountSeries count_series(const IntegerForm& form, const PositivityCertificate& certificate, std::int64_t lambda_lo,
                         std::int64_t lambda_hi, const EnumerationOptions& options) {
  require_usable(certificate);
  if (lambda_hi < lambda_lo) throw InputError("empty lambda range");
  CountSeries series;
  const std::int64_t lo = std::max<std::int64_t>(lambda_lo, 0);
  const std::size_t width = static_cast<std::size_t>(lambda_hi - lambda_lo + 1);
  std::vector<std::uint64_t> counts(width, 0);
  if (lambda_hi >= 0) {
    // tallies per slab so that concurrent slabs never share a counter
    const std::int64_t b0 = first_coordinate_bound(form, certificate, lambda_hi);
    std::vector<std::vector<std::uint64_t>> slab_counts(static_cast<std::size_t>(2 * b0 + 1));
    scan_region(form, certificate, lo, lambda_hi, options.threads,
                [&](std::size_t slab, std::span<const std::int64_t>, std::int64_t v) {
                  auto& c = slab_counts[slab];
                  if (c.empty()) c.assign(width, 0);
                  ++c[static_cast<std::size_t>(v - lambda_lo)];
                });
    for (const auto& c : slab_counts)
      for (std::size_t i = 0; i < c.size(); ++i) counts[i] += c[i];
  }
  const double exponent = 1.0 - static_cast<double>(form.arity()) / form.degree();
  for (std::size_t i = 0; i < width; ++i) {
    CountEntry e;
    e.lambda = lambda_lo + static_cast<std::int64_t>(i);
    e.count = counts[i];
    if (e.lambda > 0) e.normalized = static_cast<double>(e.count) * std::pow(static_cast<double>(e.lambda), exponent);
    series.entries.push_back(e);
  }
  return series;
}

namespace {

std::uint64_t checked_box_points(std::size_t d, std::int64_t half_width, std::uint64_t budget) {
  if (half_width < 0) throw InputError("box size must be non-negative");
  long double pts = std::pow(static_cast<long double>(2 * half_width + 1), static_cast<long double>(d));
  if (pts > static_cast<long double>(budget))
    throw BudgetExceeded("box with " + std::to_string(static_cast<double>(pts)) + " points exceeds budget " +
                         std::to_string(budget));
  return static_cast<std::uint64_t>(pts);
}

// Iterates n over [-w, w]^d in lexicographic order, chunked by the first coordinate.
template <class Fn>
void for_each_box_point(std::size_t d, std::int64_t w, std::size_t threads, Fn&& fn) {
  const std::size_t slabs = static_cast<std::size_t>(2 * w + 1);
  parallel_chunks(threads, slabs, [&](std::size_t chunk, std::size_t s_begin, std::size_t s_end) {
    std::vector<std::int64_t> n(d, -w);
    for (std::size_t s = s_begin; s < s_end; ++s) {
      n[0] = static_cast<std::int64_t>(s) - w;
      std::fill(n.begin() + 1, n.end(), -w);
      while (true) {
        fn(chunk, std::span<const std::int64_t>(n));
        std::size_t i = d;
        while (i > 1 && n[i - 1] == w) n[--i] = -w;
        if (i <= 1) break;
        ++n[i - 1];
      }
    }
  });
}

std::vector<CompiledForm> compile_all(const GradedSystem& system, std::int64_t bound) {
  std::vector<CompiledForm> out;
  for (const auto& f : system.flattened()) out.emplace_back(f, std::max<std::int64_t>(bound, 1));
  return out;
}

}  // namespace

BoxCount box_system_count(const GradedSystem& system, std::int64_t N, const BoxCountOptions& options) {
  const std::size_t d = system.arity();
  BoxCount result;
  result.box_points = checked_box_points(d, N, options.budget);
  const auto forms = compile_all(system, N);
  const std::size_t R = forms.size();
  const std::size_t threads = std::max<std::size_t>(1, std::min<std::size_t>(options.threads, 2 * N + 1));
  std::vector<std::vector<std::int64_t>> keys(threads);
  for_each_box_point(d, N, threads, [&](std::size_t chunk, std::span<const std::int64_t> n) {
    for (const auto& f : forms) keys[chunk].push_back(f(n));
  });
  std::vector<std::int64_t> all;
  for (auto& k : keys) all.insert(all.end(), k.begin(), k.end());
  std::vector<std::uint64_t> ones(all.size() / R, 1);
  result.histogram = ValueHistogram::from_unsorted(R, std::move(all), std::move(ones));
  std::tie(result.sup, result.argmax) = result.histogram.sup();
  return result;
}

std::uint64_t box_system_count(const GradedSystem& system, std::int64_t N, std::span<const std::int64_t> target,
                               const BoxCountOptions& options) {
  const std::size_t d = system.arity();
  checked_box_points(d, N, options.budget);
  const auto forms = compile_all(system, N);
  if (target.size() != forms.size()) throw InputError("target length must equal the number of nonlinear forms");
  const std::size_t threads = std::max<std::size_t>(1, std::min<std::size_t>(options.threads, 2 * N + 1));
  std::vector<std::uint64_t> counts(threads, 0);
  for_each_box_point(d, N, threads, [&](std::size_t chunk, std::span<const std::int64_t> n) {
    for (std::size_t i = 0; i < forms.size(); ++i)
      if (forms[i](n) != target[i]) return;
    ++counts[chunk];
  });
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  return total;
}

namespace {

// Support half-width of the cutoff at scale N.
std::int64_t cutoff_half_width(CutoffKind cutoff, std::int64_t N) { return cutoff == CutoffKind::indicator ? N : 2 * N - 1; }

template <class Fn>
void for_each_graph_point(const GradedSystem& system, std::int64_t w, const BoxCountOptions& options, Fn&& fn) {
  const std::size_t d = system.arity();
  checked_box_points(d, w, options.budget);
  const auto forms = compile_all(system, w);
  std::vector<std::int64_t> key(d + forms.size());
  for_each_box_point(d, w, 1, [&](std::size_t, std::span<const std::int64_t> n) {
    std::copy(n.begin(), n.end(), key.begin());
    for (std::size_t i = 0; i < forms.size(); ++i) key[d + i] = forms[i](n);
    fn(n, std::span<const std::int64_t>(key));
  });
}

}  // namespace

ValueHistogram graph_value_histogram(const GradedSystem& system, std::int64_t N, const BoxCountOptions& options) {
  const std::size_t dim = system.arity() + system.total_nonlinear();
  std::vector<std::int64_t> keys;
  std::vector<std::uint64_t> values;
  for_each_graph_point(system, N, options, [&](std::span<const std::int64_t>, std::span<const std::int64_t> key) {
    keys.insert(keys.end(), key.begin(), key.end());
    values.push_back(1);
  });
  return ValueHistogram::from_unsorted(dim, std::move(keys), std::move(values));
}

ScaledWeights graph_smooth_weights(const GradedSystem& system, std::int64_t N, const BoxCountOptions& options) {
  if (N <= 0) throw InputError("smooth cutoff needs N >= 1");
  const std::size_t d = system.arity();
  const std::size_t dim = d + system.total_nonlinear();
  std::vector<std::int64_t> keys;
  std::vector<Rational> weights;
  std::vector<Rational> u(d);
  for_each_graph_point(system, cutoff_half_width(CutoffKind::smooth, N), options,
                       [&](std::span<const std::int64_t> n, std::span<const std::int64_t> key) {
                         for (std::size_t i = 0; i < d; ++i) u[i] = Rational(n[i], N);
                         Rational w = bump::smooth_cutoff(u);
                         if (w == 0) return;
                         keys.insert(keys.end(), key.begin(), key.end());
                         weights.push_back(std::move(w));
                       });
  BigInt den = 1;
  for (const auto& w : weights) den = boost::integer::lcm(den, BigInt(denominator(w)));
  std::vector<BigInt> scaled;
  scaled.reserve(weights.size());
  for (const auto& w : weights) scaled.push_back(numerator(w) * (den / denominator(w)));
  return {WeightedHistogram::from_unsorted(dim, std::move(keys), std::move(scaled)), den};
}

MomentCount moment_from_histogram(const ValueHistogram& h, unsigned l, const ConvolutionOptions& options) {
  auto power = convolution_power(h, l, options);
  MomentCount m;
  auto [sup, arg] = power.sup();
  m.sup = Rational(BigInt(sup));
  m.argmax = std::move(arg);
  m.sum_of_squares = Rational(sum_of_squares(power));
  m.support = power.size();
  m.box_points = h.total();
  return m;
}

MomentCount moment_from_histogram(const ScaledWeights& w, unsigned l, const ConvolutionOptions& options) {
  auto power = convolution_power(w.histogram, l, options);
  MomentCount m;
  const BigInt den_l = ipow(w.denominator, l);
  auto [sup, arg] = power.sup();
  m.sup = Rational(sup, den_l);
  m.argmax = std::move(arg);
  m.sum_of_squares = Rational(sum_of_squares(power), den_l * den_l);
  m.support = power.size();
  m.box_points = w.histogram.size();
  return m;
}

MomentCount moment_count(const GradedSystem& system, std::int64_t N, unsigned l, CutoffKind cutoff,
                         const BoxCountOptions& options) {
  if (l == 0) throw InputError("moment order l must be >= 1");
  ConvolutionOptions conv{options.budget, options.threads};
  if (cutoff == CutoffKind::indicator) return moment_from_histogram(graph_value_histogram(system, N, options), l, conv);
  return moment_from_histogram(graph_smooth_weights(system, N, options), l, conv);
}

}  // namespace restrictlab
