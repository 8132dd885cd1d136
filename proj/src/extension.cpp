#include "restrictlab/extension.hpp"

#include "restrictlab/bump.hpp"
#include "restrictlab/compiled_form.hpp"

#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <tuple>

namespace restrictlab {

namespace {

struct Placement {
  std::size_t dim = 0;
  std::vector<std::int64_t> keys;  // flat
  std::vector<Complex> values;
  std::vector<std::int64_t> bounds;
};

double real_pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return real_pairwise_sum(v.first(h)) + real_pairwise_sum(v.subspan(h));
}

std::int64_t coefficient_bound(const IntegerForm& f, std::int64_t w) {
  BigInt s = 0;
  for (const auto& t : f.terms()) s += abs(t.coefficient);
  return to_int64(s * ipow(BigInt(w), f.degree()));
}

std::vector<std::int64_t> spans_of(const Placement& p) {
  std::vector<std::int64_t> lo(p.dim, 0), hi(p.dim, 0);
  const std::size_t n = p.values.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < p.dim; ++c) {
      const std::int64_t v = p.keys[i * p.dim + c];
      if (i == 0 || v < lo[c]) lo[c] = v;
      if (i == 0 || v > hi[c]) hi[c] = v;
    }
  std::vector<std::int64_t> span(p.dim);
  for (std::size_t c = 0; c < p.dim; ++c) span[c] = hi[c] - lo[c];
  return span;
}

std::int64_t mod(std::int64_t x, std::int64_t g) {
  std::int64_t r = x % g;
  return r < 0 ? r + g : r;
}

TorusGridFunction synthesize(const Placement& p, std::vector<std::size_t> sizes, const GridOptions& options) {
  TorusGridFunction grid;
  grid.frequency_bounds = p.bounds;
  grid.spans = spans_of(p);
  if (sizes.empty()) sizes = exact_grid_sizes(grid.spans, std::max(1u, options.moment_order));
  if (sizes.size() != p.dim) throw InputError("grid needs " + std::to_string(p.dim) + " axis sizes");
  long double volume = 1;
  for (std::size_t c = 0; c < p.dim; ++c) {
    if (sizes[c] == 0) throw InputError("grid axis sizes must be positive");
    volume *= static_cast<long double>(sizes[c]);
    if (static_cast<std::int64_t>(sizes[c]) <= grid.spans[c]) grid.aliased = true;
  }
  if (volume > static_cast<long double>(options.budget))
    throw BudgetExceeded("grid volume " + std::to_string(static_cast<double>(volume)) + " exceeds budget");
  grid.sizes = sizes;
  grid.values.assign(static_cast<std::size_t>(volume), Complex(0, 0));
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    std::size_t idx = 0;
    for (std::size_t c = 0; c < p.dim; ++c)
      idx = idx * sizes[c] + static_cast<std::size_t>(mod(p.keys[i * p.dim + c], static_cast<std::int64_t>(sizes[c])));
    grid.values[idx] += p.values[i];
  }
  fft::transform(sizes, grid.values, -1, options.threads);
  return grid;
}

void check_weight_arity(const WeightFunction& w, std::size_t d) {
  if (w.kind() == WeightKind::explicit_map)
    for (const auto& [n, v] : w.entries())
      if (n.size() != d) throw InputError("weight key arity does not match the form");
}

Placement graph_placement(const GradedSystem& system, const WeightFunction& weights, const GridOptions& options) {
  const std::size_t d = system.arity();
  check_weight_arity(weights, d);
  const auto forms = system.flattened();
  const std::int64_t w = weights.support_bound();
  Placement p;
  p.dim = d + forms.size();
  p.bounds.assign(d, w);
  for (const auto& f : forms) p.bounds.push_back(coefficient_bound(f, w));
  BoxCountOptions box{options.budget, options.threads};
  switch (weights.kind()) {
    case WeightKind::indicator_box: {
      auto h = graph_value_histogram(system, weights.scale(), box);
      p.keys = h.flat_keys();
      p.values.assign(h.size(), Complex(1, 0));
      break;
    }
    case WeightKind::smooth_cutoff: {
      auto s = graph_smooth_weights(system, weights.scale(), box);
      p.keys = s.histogram.flat_keys();
      for (const auto& v : s.histogram.values()) p.values.emplace_back(to_double(Rational(v, s.denominator)), 0);
      break;
    }
    case WeightKind::explicit_map: {
      std::vector<CompiledForm> compiled;
      for (const auto& f : forms) compiled.emplace_back(f, w);
      for (const auto& [n, v] : weights.entries()) {
        p.keys.insert(p.keys.end(), n.begin(), n.end());
        for (const auto& cf : compiled) p.keys.push_back(cf(std::span<const std::int64_t>(n)));
        p.values.push_back(v);
      }
      break;
    }
  }
  return p;
}

Placement hypersurface_placement(const LatticeSolutionSet& set, const WeightFunction& weights) {
  check_weight_arity(weights, set.arity());
  Placement p;
  p.dim = set.arity();
  p.bounds.assign(p.dim, set.coordinate_bound());
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Complex a = weights(set.point(i));
    if (a == Complex(0, 0)) continue;
    p.keys.insert(p.keys.end(), set.point(i).begin(), set.point(i).end());
    p.values.push_back(a);
  }
  return p;
}

EvenMoment complex_moment(const Placement& p, unsigned l, const GridOptions& options) {
  auto h = ComplexHistogram::from_unsorted(p.dim, p.keys, p.values);
  auto power = convolution_power(h, l, {options.budget, options.threads});
  return {std::nullopt, sum_of_squares(power)};
}

EvenMoment from_count(const MomentCount& m) { return {m.sum_of_squares, to_double(m.sum_of_squares)}; }

// Every other sample on the even axes.
std::optional<std::vector<double>> coarse_moduli(const TorusGridFunction& grid) {
  const std::size_t m = grid.sizes.size();
  std::vector<std::size_t> step(m, 1);
  bool any = false;
  for (std::size_t c = 0; c < m; ++c)
    if (grid.sizes[c] % 2 == 0 && grid.sizes[c] >= 2) step[c] = 2, any = true;
  if (!any) return std::nullopt;
  std::vector<double> out;
  std::vector<std::size_t> j(m, 0);
  while (true) {
    std::size_t idx = 0;
    for (std::size_t c = 0; c < m; ++c) idx = idx * grid.sizes[c] + j[c];
    out.push_back(std::abs(grid.values[idx]));
    std::size_t c = m;
    while (c > 0) {
      j[c - 1] += step[c - 1];
      if (j[c - 1] < grid.sizes[c - 1]) break;
      j[c - 1] = 0;
      --c;
    }
    if (c == 0) break;
  }
  return out;
}

std::pair<double, double> norm_of(std::span<const double> moduli, double p) {
  if (std::isinf(p)) {
    double mx = 0;
    for (double v : moduli) mx = std::max(mx, v);
    return {mx, mx};
  }
  std::vector<double> terms(moduli.size());
  for (std::size_t i = 0; i < moduli.size(); ++i) terms[i] = std::pow(moduli[i], p);
  const double mean = real_pairwise_sum(terms) / static_cast<double>(terms.size());
  return {std::pow(mean, 1.0 / p), mean};
}

unsigned order_for(std::span<const double> ps) {
  unsigned l = 1;
  for (double p : ps) l = std::max(l, std::isinf(p) ? 2u : static_cast<unsigned>(std::ceil(p / 2)));
  return l;
}

std::uint64_t mix_seed(std::uint64_t seed, std::int64_t scale, std::size_t draw) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(scale), static_cast<std::uint32_t>(draw)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

struct NamedWeights {
  std::string label;
  WeightFunction weights;
};

template <class Eval>
void add_rows(RatioReport& report, std::int64_t scale, std::span<const double> ps, const RatioPolicy& policy,
              const std::vector<NamedWeights>& draws, Eval&& eval) {
  for (const auto& [label, w] : draws) {
    auto [grid, a2, bound_of] = eval(w);
    for (double p : ps) {
      auto n = lp_norm(grid, p);
      RatioRow row{scale, p, label, n.value, bound_of(p) * a2, 0, 0, n.error_estimate, false};
      row.ratio = row.bound > 0 ? row.norm / row.bound : std::numeric_limits<double>::quiet_NaN();
      row.flagged = n.error_estimate && *n.error_estimate > policy.error_tolerance * n.value;
      double prev = 0;
      for (const auto& r : report.rows)
        if (r.p == p && r.weights == label) prev = std::max(prev, r.running_max);
      row.running_max = std::max(prev, row.ratio);
      report.flagged += row.flagged;
      report.rows.push_back(std::move(row));
    }
  }
}

void finish_trends(RatioReport& report, std::span<const double> ps) {
  for (double p : ps) {
    std::map<std::int64_t, double> best;
    for (const auto& r : report.rows)
      if (r.p == p) best[r.scale] = std::max(best[r.scale], r.ratio);
    RatioTrend t{p, 0, std::nullopt};
    std::vector<double> x, y;
    for (const auto& [s, v] : best) {
      t.max_ratio = std::max(t.max_ratio, v);
      if (s >= 1 && v > 0) x.push_back(std::log(static_cast<double>(s))), y.push_back(std::log(v));
    }
    if (x.size() >= 2) t.slope = fitted_slope(x, y);
    report.trends.push_back(t);
  }
}

void check_ps(std::span<const double> ps) {
  if (ps.empty()) throw InputError("ratio report needs at least one p");
  for (double p : ps)
    if (!(p >= 1)) throw InputError("p must lie in [1, inf]");
}

}  // namespace

WeightFunction WeightFunction::indicator_box(std::int64_t N) {
  if (N < 0) throw InputError("box weight needs N >= 0");
  WeightFunction w;
  w.kind_ = WeightKind::indicator_box;
  w.N_ = w.bound_ = N;
  return w;
}

WeightFunction WeightFunction::smooth_cutoff(std::int64_t N) {
  if (N <= 0) throw InputError("smooth cutoff needs N >= 1");
  WeightFunction w;
  w.kind_ = WeightKind::smooth_cutoff;
  w.N_ = N;
  w.bound_ = 2 * N - 1;
  return w;
}

WeightFunction WeightFunction::explicit_map(std::map<std::vector<std::int64_t>, Complex> values) {
  WeightFunction w;
  w.kind_ = WeightKind::explicit_map;
  std::size_t dim = values.empty() ? 0 : values.begin()->first.size();
  for (auto it = values.begin(); it != values.end();) {
    if (it->first.size() != dim) throw InputError("explicit weights mix key lengths");
    if (!std::isfinite(it->second.real()) || !std::isfinite(it->second.imag()))
      throw InputError("explicit weights must be finite");
    if (it->second == Complex(0, 0)) {
      it = values.erase(it);
      continue;
    }
    for (auto c : it->first) w.bound_ = std::max(w.bound_, c < 0 ? -c : c);
    ++it;
  }
  w.entries_ = std::move(values);
  w.N_ = w.bound_;
  return w;
}

std::int64_t WeightFunction::support_bound() const { return bound_; }

Complex WeightFunction::operator()(std::span<const std::int64_t> n) const {
  if (kind_ == WeightKind::explicit_map) {
    auto it = entries_.find(std::vector<std::int64_t>(n.begin(), n.end()));
    return it == entries_.end() ? Complex(0, 0) : it->second;
  }
  return {to_double(exact(n)), 0};
}

Rational WeightFunction::exact(std::span<const std::int64_t> n) const {
  switch (kind_) {
    case WeightKind::indicator_box:
      for (auto c : n)
        if (c > N_ || c < -N_) return 0;
      return 1;
    case WeightKind::smooth_cutoff: {
      std::vector<Rational> u;
      for (auto c : n) u.emplace_back(c, N_);
      return bump::smooth_cutoff(u);
    }
    case WeightKind::explicit_map: break;
  }
  throw InputError("explicit weights have no exact value");
}

WeightFunction random_phase_weights(std::size_t dim, std::span<const std::int64_t> points, std::uint64_t seed) {
  if (dim == 0 || points.size() % dim) throw InputError("random weights: bad point list");
  const std::size_t count = points.size() / dim;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double scale = count ? 1.0 / std::sqrt(static_cast<double>(count)) : 0.0;
  std::map<std::vector<std::int64_t>, Complex> values;
  for (std::size_t i = 0; i < count; ++i)
    values[std::vector<std::int64_t>(points.begin() + static_cast<long>(i * dim),
                                     points.begin() + static_cast<long>((i + 1) * dim))] = e(unit(rng)) * scale;
  return WeightFunction::explicit_map(std::move(values));
}

std::uint64_t TorusGridFunction::exact_even_order() const {
  std::uint64_t l = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t c = 0; c < sizes.size(); ++c)
    if (spans[c] > 0) l = std::min<std::uint64_t>(l, (sizes[c] - 1) / static_cast<std::uint64_t>(spans[c]));
  return l;
}

std::vector<std::size_t> exact_grid_sizes(std::span<const std::int64_t> spans, unsigned l) {
  std::vector<std::size_t> out;
  for (auto s : spans) {
    std::size_t g = static_cast<std::size_t>(l) * static_cast<std::size_t>(s) + 1;
    out.push_back(g + (g % 2));
  }
  return out;
}

TorusGridFunction grid_eval_hypersurface(const LatticeSolutionSet& set, const WeightFunction& weights,
                                         std::vector<std::size_t> sizes, const GridOptions& options) {
  return synthesize(hypersurface_placement(set, weights), std::move(sizes), options);
}

TorusGridFunction grid_eval_graph(const GradedSystem& system, const WeightFunction& weights,
                                  std::vector<std::size_t> sizes, const GridOptions& options) {
  return synthesize(graph_placement(system, weights, options), std::move(sizes), options);
}

LpNorm lp_norm(const TorusGridFunction& grid, double p) {
  if (!(p >= 1)) throw InputError("p must lie in [1, inf]");
  if (grid.values.empty()) throw InputError("empty grid");
  std::vector<double> moduli(grid.values.size());
  for (std::size_t i = 0; i < moduli.size(); ++i) moduli[i] = std::abs(grid.values[i]);
  LpNorm out;
  std::tie(out.value, out.power_mean) = norm_of(moduli, p);
  if (!std::isinf(p) && p == std::floor(p) && static_cast<std::uint64_t>(p) % 2 == 0 &&
      static_cast<std::uint64_t>(p) / 2 <= grid.exact_even_order()) {
    out.exact = true;
    out.error_estimate = 0.0;
    return out;
  }
  if (auto coarse = coarse_moduli(grid)) out.error_estimate = std::abs(out.value - norm_of(*coarse, p).first);
  return out;
}

EvenMoment even_moment_exact(const GradedSystem& system, const WeightFunction& weights, unsigned l,
                             const GridOptions& options) {
  if (l == 0) throw InputError("moment order l must be >= 1");
  BoxCountOptions box{options.budget, options.threads};
  switch (weights.kind()) {
    case WeightKind::indicator_box: return from_count(moment_count(system, weights.scale(), l, CutoffKind::indicator, box));
    case WeightKind::smooth_cutoff: return from_count(moment_count(system, weights.scale(), l, CutoffKind::smooth, box));
    case WeightKind::explicit_map: break;
  }
  return complex_moment(graph_placement(system, weights, options), l, options);
}

EvenMoment even_moment_exact(const LatticeSolutionSet& set, const WeightFunction& weights, unsigned l,
                             const GridOptions& options) {
  if (l == 0) throw InputError("moment order l must be >= 1");
  if (weights.kind() == WeightKind::explicit_map)
    return complex_moment(hypersurface_placement(set, weights), l, options);
  std::vector<std::int64_t> keys;
  std::vector<Rational> w;
  for (std::size_t i = 0; i < set.size(); ++i) {
    Rational v = weights.exact(set.point(i));
    if (v == 0) continue;
    keys.insert(keys.end(), set.point(i).begin(), set.point(i).end());
    w.push_back(std::move(v));
  }
  BigInt den = 1;
  for (const auto& v : w) den = boost::integer::lcm(den, BigInt(denominator(v)));
  std::vector<BigInt> scaled;
  for (const auto& v : w) scaled.push_back(numerator(v) * (den / denominator(v)));
  ScaledWeights sw{WeightedHistogram::from_unsorted(set.arity(), std::move(keys), std::move(scaled)), den};
  if (sw.histogram.empty()) return {Rational(0), 0.0};
  return from_count(moment_from_histogram(sw, l, {options.budget, options.threads}));
}

double l2_norm_squared(const GradedSystem& system, const WeightFunction& weights) {
  GridOptions options;
  auto p = graph_placement(system, weights, options);
  std::vector<double> sq;
  for (const auto& v : p.values) sq.push_back(std::norm(v));
  return real_pairwise_sum(sq);
}

double l2_norm_squared(const LatticeSolutionSet& set, const WeightFunction& weights) {
  auto p = hypersurface_placement(set, weights);
  std::vector<double> sq;
  for (const auto& v : p.values) sq.push_back(std::norm(v));
  return real_pairwise_sum(sq);
}

RatioReport ratio_report_hypersurface(const IntegerForm& form, const PositivityCertificate& certificate,
                                      std::int64_t lambda_lo, std::int64_t lambda_hi, std::span<const double> ps,
                                      const RatioPolicy& policy) {
  check_ps(ps);
  if (lambda_lo < 0 || lambda_hi < lambda_lo) throw InputError("bad lambda range");
  const double d = static_cast<double>(form.arity()), k = form.degree();
  const GridOptions grid_options{policy.budget, policy.threads, order_for(ps)};
  RatioReport report;
  for (std::int64_t lambda = lambda_lo; lambda <= lambda_hi; ++lambda) {
    auto set = enumerate_level_set(form, certificate, lambda, {policy.threads});
    if (set.empty()) {
      report.skipped.push_back(lambda);
      continue;
    }
    std::vector<NamedWeights> draws;
    if (policy.uniform) draws.push_back({"uniform", WeightFunction::indicator_box(set.coordinate_bound())});
    for (std::size_t i = 0; i < policy.random_draws; ++i)
      draws.push_back({"random:" + std::to_string(i),
                       random_phase_weights(set.arity(), set.flat(), mix_seed(policy.seed, lambda, i))});
    add_rows(report, lambda, ps, policy, draws, [&](const WeightFunction& w) {
      auto bound_of = [&, lambda](double p) {
        const double exponent = (d - k) / (2 * k) - (std::isinf(p) ? 0.0 : d / (k * p));
        return 1 + std::pow(static_cast<double>(lambda), exponent);
      };
      return std::tuple{grid_eval_hypersurface(set, w, {}, grid_options), std::sqrt(l2_norm_squared(set, w)),
                        std::function<double(double)>(bound_of)};
    });
  }
  finish_trends(report, ps);
  return report;
}

RatioReport ratio_report_graph(const GradedSystem& system, std::int64_t N_lo, std::int64_t N_hi,
                               std::span<const double> ps, const RatioPolicy& policy) {
  check_ps(ps);
  if (N_lo < 1 || N_hi < N_lo) throw InputError("bad N range");
  const double d = static_cast<double>(system.arity()), D = static_cast<double>(system.total_degree());
  const GridOptions grid_options{policy.budget, policy.threads, order_for(ps)};
  RatioReport report;
  for (std::int64_t N = N_lo; N <= N_hi; ++N) {
    std::vector<NamedWeights> draws;
    if (policy.uniform) draws.push_back({"uniform", WeightFunction::indicator_box(N)});
    if (policy.random_draws) {
      std::vector<std::int64_t> box;
      std::vector<std::int64_t> n(system.arity(), -N);
      while (true) {
        box.insert(box.end(), n.begin(), n.end());
        std::size_t c = n.size();
        while (c > 0 && n[c - 1] == N) n[--c] = -N;
        if (c == 0) break;
        ++n[c - 1];
      }
      for (std::size_t i = 0; i < policy.random_draws; ++i)
        draws.push_back({"random:" + std::to_string(i),
                         random_phase_weights(system.arity(), box, mix_seed(policy.seed, N, i))});
    }
    add_rows(report, N, ps, policy, draws, [&](const WeightFunction& w) {
      auto bound_of = [&, N](double p) {
        const double exponent = d / 2 - (std::isinf(p) ? 0.0 : D / p);
        return std::pow(static_cast<double>(N), exponent);
      };
      return std::tuple{grid_eval_graph(system, w, {}, grid_options), std::sqrt(l2_norm_squared(system, w)),
                        std::function<double(double)>(bound_of)};
    });
  }
  finish_trends(report, ps);
  return report;
}

}  // namespace restrictlab
