#include "restrictlab/magyar.hpp"

#include "restrictlab/bump.hpp"
#include "restrictlab/compiled_form.hpp"

#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace restrictlab {

namespace {

int floor_log2(std::int64_t q) { return 63 - std::countl_zero(static_cast<std::uint64_t>(q)); }

std::int64_t mod(std::int64_t x, std::int64_t q) {
  std::int64_t r = x % q;
  return r < 0 ? r + q : r;
}

}  // namespace

int shell_limit(std::int64_t lambda, unsigned k, Truncation rule) {
  if (lambda < 1) throw InputError("shell limit needs lambda >= 1");
  const BigInt lam(lambda);
  int s = 0;
  if (rule == Truncation::ceiling) {
    while ((BigInt(1) << (s * static_cast<int>(k))) < lam) ++s;
  } else {
    while ((BigInt(1) << ((s + 1) * static_cast<int>(k))) <= lam) ++s;
  }
  return s;
}

std::vector<FractionAQ> fraction_shell(int s) {
  if (s < 0 || s > 40) throw InputError("shell index out of range");
  std::vector<FractionAQ> out;
  for (std::int64_t q = std::int64_t{1} << s; q < (std::int64_t{1} << (s + 1)); ++q)
    for (const auto& f : unit_fractions(q)) out.push_back(f);
  return out;
}

GaussSumCache::GaussSumCache(IntegerForm form, std::uint64_t budget) : form_(std::move(form)), budget_(budget) {
  if (form_.is_diagonal())
    for (const auto& c : form_.pure_power_coefficients()) diagonal_.push_back(to_int64(c));
}

Complex GaussSumCache::operator()(const FractionAQ& f, std::span<const std::int64_t> m) const {
  const auto key = std::pair{f.a, f.q};
  std::lock_guard lock(mutex_);
  if (!diagonal_.empty()) {
    auto it = factors_.find(key);
    if (it == factors_.end()) {
      std::vector<std::vector<Complex>> per_axis;
      for (auto c : diagonal_) {
        std::vector<Complex> row(static_cast<std::size_t>(f.q));
        for (std::int64_t r = 0; r < f.q; ++r) row[static_cast<std::size_t>(r)] = gauss_sum_1d(c, form_.degree(), f, r);
        per_axis.push_back(std::move(row));
      }
      it = factors_.emplace(key, std::move(per_axis)).first;
    }
    Complex v = 1;
    for (std::size_t i = 0; i < m.size(); ++i) v *= it->second[i][static_cast<std::size_t>(mod(m[i], f.q))];
    return v;
  }
  auto it = tables_.find(key);
  if (it == tables_.end()) {
    const long double cells = std::pow(static_cast<long double>(f.q), static_cast<long double>(form_.arity()));
    if (cells > static_cast<long double>(budget_)) return gauss_sum(form_, f, m);
    it = tables_.emplace(key, gauss_sum_table(form_, f, budget_)).first;
  }
  return it->second.at(m);
}

MagyarDecomposition::MagyarDecomposition(IntegerForm form, StarQuadrature quadrature, Truncation truncation,
                                         std::size_t threads)
    : form_(form), quad_(std::move(quadrature)), truncation_(truncation), threads_(threads), gauss_(std::move(form)) {
  if (quad_.dim != form_.arity() || quad_.degree != form_.degree())
    throw InputError("quadrature was built for a different form");
}

Complex MagyarDecomposition::evaluate(std::int64_t lambda, const FractionAQ& f, std::span<const double> xi,
                                      const std::function<double(std::span<const double>)>& window) const {
  const std::size_t d = form_.arity();
  if (xi.size() != d) throw InputError("frequency has wrong dimension");
  const double scale = std::ldexp(1.0, floor_log2(f.q));
  const double L = std::pow(static_cast<double>(lambda), 1.0 / form_.degree());
  // only the nearest m/q on each axis can fall inside the window
  std::vector<std::int64_t> m(d);
  std::vector<double> eta(d), scaled(d);
  for (std::size_t i = 0; i < d; ++i) {
    m[i] = std::llround(static_cast<double>(f.q) * xi[i]);
    eta[i] = xi[i] - static_cast<double>(m[i]) / static_cast<double>(f.q);
    scaled[i] = scale * eta[i];
  }
  const double w = window(scaled);
  if (w == 0) return 0;
  for (auto& v : eta) v *= L;
  return gauss_(f, m) * w * sigma(eta);
}

Complex MagyarDecomposition::sigma(const std::vector<double>& arg) const {
  {
    std::lock_guard lock(sigma_mutex_);
    if (auto it = sigma_memo_.find(arg); it != sigma_memo_.end()) return it->second;
  }
  const Complex v = sigma_ft(quad_, arg, threads_);
  std::lock_guard lock(sigma_mutex_);
  if (sigma_memo_.size() > 100000) sigma_memo_.clear();
  sigma_memo_.emplace(arg, v);
  return v;
}

Complex MagyarDecomposition::multiplier(std::int64_t lambda, const FractionAQ& f, std::span<const double> xi) const {
  return evaluate(lambda, f, xi, [](std::span<const double> u) { return bump::psi(u); });
}

Complex MagyarDecomposition::multiplier_piece(std::int64_t lambda, const FractionAQ& f, int j, int j_max,
                                              std::span<const double> xi) const {
  return evaluate(lambda, f, xi, [&](std::span<const double> u) { return bump::lp_piece(j, j_max, u); });
}

Complex MagyarDecomposition::main_term(std::int64_t lambda, std::span<const double> xi) const {
  const int S = shell_limit(lambda, form_.degree(), truncation_);
  Complex total = 0;
  for (int s = 0; s <= S; ++s) {
    Complex shell = 0;
    for (const auto& f : fraction_shell(s)) {
      const Complex mu = multiplier(lambda, f, xi);
      if (mu != Complex(0)) shell += e_frac(mod(-f.a * mod(lambda, f.q), f.q), f.q) * mu;
    }
    total += shell;
  }
  return total;
}

Complex MagyarDecomposition::scaled_extension(const LatticeSolutionSet& set, std::span<const double> xi) const {
  const double factor = std::pow(static_cast<double>(set.lambda()),
                                 1.0 - static_cast<double>(form_.arity()) / form_.degree());
  return factor * raw_extension_sum(set, {}, xi);
}

Complex MagyarDecomposition::error_term(const LatticeSolutionSet& set, std::span<const double> xi) const {
  return scaled_extension(set, xi) - main_term(set.lambda(), xi);
}

double spearman_correlation(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) return std::nan("");
  auto ranks = [n](std::span<const double> v) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2 + 1;
      for (std::size_t t = i; t <= j; ++t) r[order[t]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double mean = (static_cast<double>(n) + 1) / 2;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  return (sxx > 0 && syy > 0) ? sxy / std::sqrt(sxx * syy) : std::nan("");
}

MinorArcReport minor_arc_report(const MagyarDecomposition& decomposition, const PositivityCertificate& certificate,
                                std::span<const std::int64_t> lambdas, const std::vector<std::vector<double>>& xis,
                                const Rational& gamma, const MinorArcOptions& options) {
  MinorArcReport report;
  if (lambdas.empty()) return report;
  if (xis.empty()) throw InputError("minor arc report needs at least one frequency");
  const auto& form = decomposition.form();
  const double exponent = 1.0 - static_cast<double>(form.arity()) / form.degree();
  for (auto lambda : lambdas) {
    if (lambda < 1) throw InputError("minor arc report needs lambda >= 1");
    const auto set = enumerate_level_set(form, certificate, lambda, {options.threads});
    MinorArcRow row{lambda, -1, 0, static_cast<double>(set.size()) * std::pow(static_cast<double>(lambda), exponent),
                    std::pow(static_cast<double>(lambda), -to_double(gamma)), std::nullopt, false};
    double qerr = 0;
    for (std::size_t i = 0; i < xis.size(); ++i) {
      const Complex main = decomposition.main_term(lambda, xis[i]);
      const double err = std::abs(decomposition.scaled_extension(set, xis[i]) - main);
      if (err > row.sup_error) {
        row.sup_error = err;
        row.argmax = i;
      }
      if (options.reference) qerr = std::max(qerr, std::abs(main - options.reference->main_term(lambda, xis[i])));
    }
    if (options.reference) {
      row.quadrature_error = qerr;
      row.quadrature_dominated = qerr > row.sup_error;
      report.warning = report.warning || row.quadrature_dominated;
    }
    report.rows.push_back(row);
  }
  if (report.rows.size() >= 2) {
    std::vector<double> lx, ly, lam, sup;
    for (const auto& r : report.rows) {
      lam.push_back(static_cast<double>(r.lambda));
      sup.push_back(r.sup_error);
      if (r.sup_error > 0) {
        lx.push_back(std::log(static_cast<double>(r.lambda)));
        ly.push_back(std::log(r.sup_error));
      }
    }
    const double slope = fitted_slope(lx, ly);
    if (std::isfinite(slope)) report.slope = slope;
    const double rho = spearman_correlation(lam, sup);
    if (std::isfinite(rho)) report.spearman = rho;
  }
  return report;
}

KernelCheck kernel_identity_check(const MagyarDecomposition& decomposition, std::int64_t lambda, const FractionAQ& f,
                                  int j, const KernelCheckOptions& options) {
  const auto& form = decomposition.form();
  const auto& quad = decomposition.quadrature();
  const std::size_t d = form.arity();
  if (d > 3) throw InputError("kernel identity check supports d <= 3");
  if (j < 0 || j > options.j_max) throw InputError("piece index out of range");
  if (lambda < 1) throw InputError("kernel identity check needs lambda >= 1");
  const auto G = static_cast<std::int64_t>(options.grid);
  const double L = std::pow(static_cast<double>(lambda), 1.0 / form.degree());
  const auto R = static_cast<std::int64_t>(std::ceil(options.radius * L));
  if (G <= 2 * R + 1) throw InputError("grid too small for the comparison radius");
  std::uint64_t cells = 1;
  for (std::size_t i = 0; i < d; ++i) cells *= static_cast<std::uint64_t>(G);
  if (cells > default_budget()) throw BudgetExceeded("kernel grid exceeds budget");
  const double norm = std::pow(static_cast<double>(lambda), static_cast<double>(d) / form.degree() - 1);

  // path (i): samples of the multiplier piece, inverse DFT (exp(+2 pi i x.xi) is FFTW_BACKWARD)
  auto* buf = fftw_alloc_complex(cells);
  std::vector<int> dims(d, static_cast<int>(G));
  fftw_plan plan;
  {
    std::lock_guard lock(fft::planner_mutex());
    plan = fftw_plan_dft(static_cast<int>(d), dims.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  std::vector<double> xi(d);
  for (std::uint64_t idx = 0; idx < cells; ++idx) {
    std::uint64_t rest = idx;
    for (std::size_t i = d; i-- > 0;) {
      xi[i] = static_cast<double>(rest % static_cast<std::uint64_t>(G)) / static_cast<double>(G);
      rest /= static_cast<std::uint64_t>(G);
    }
    const Complex v = decomposition.multiplier_piece(lambda, f, j, options.j_max, xi);
    buf[idx][0] = v.real();
    buf[idx][1] = v.imag();
  }
  fftw_execute(plan);
  auto path_i = [&](std::span<const std::int64_t> x) {
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < d; ++i) idx = idx * static_cast<std::uint64_t>(G) + static_cast<std::uint64_t>(mod(x[i], G));
    return Complex(buf[idx][0], buf[idx][1]) * (norm / static_cast<double>(cells));
  };

  // path (ii): hat Phi_j factors through per-axis tables of hat chi
  const double c1 = std::ldexp(1.0, floor_log2(f.q) + j);
  std::vector<double> scales{c1};
  if (j < options.j_max) scales.push_back(2 * c1);
  const std::size_t width = static_cast<std::size_t>(2 * R + 1);
  const std::size_t span_values = 3 * width;  // axis values v in [-R, R] + {-G, 0, G}
  auto value_index = [&](std::int64_t v) {
    const std::int64_t shift = v < -R ? 0 : (v > R ? 2 : 1);
    return static_cast<std::size_t>(shift) * width + static_cast<std::size_t>(v - (shift - 1) * G + R);
  };
  const std::size_t nodes = quad.size();
  std::vector<double> table(scales.size() * nodes * d * span_values);
  for (std::size_t sc = 0; sc < scales.size(); ++sc)
    for (std::size_t n = 0; n < nodes; ++n)
      for (std::size_t i = 0; i < d; ++i)
        for (std::int64_t shift = -1; shift <= 1; ++shift)
          for (std::int64_t v = -R; v <= R; ++v) {
            const std::int64_t at = v + shift * G;
            const double z = (static_cast<double>(at) - L * quad.nodes[n * d + i]) / scales[sc];
            table[((sc * nodes + n) * d + i) * span_values + value_index(at)] = bump::chi_hat(z) / scales[sc];
          }
  auto profile = [&](std::span<const std::int64_t> x) {
    double total = 0;
    for (std::size_t n = 0; n < nodes; ++n) {
      double term = 0;
      for (std::size_t sc = 0; sc < scales.size(); ++sc) {
        double p = 1;
        for (std::size_t i = 0; i < d; ++i) p *= table[((sc * nodes + n) * d + i) * span_values + value_index(x[i])];
        term += sc == 0 ? p : -p;
      }
      total += quad.mass_weights[n] * term;
    }
    return norm * total;
  };

  CompiledForm compiled(form, 0);
  const auto reduced = compiled.reduced_coefficients(f.q);
  KernelCheck out;
  struct Sample {
    Complex k_i;
    Complex k_ii;
    double profile;
    Complex phase;
  };
  std::vector<Sample> samples;
  std::vector<std::int64_t> x(d, -R), y(d), b(d);
  double max_profile = 0;
  while (true) {
    double r2 = 0;
    for (auto v : x) r2 += static_cast<double>(v * v);
    if (r2 <= options.radius * options.radius * L * L) {
      for (std::size_t i = 0; i < d; ++i) b[i] = mod(x[i], f.q);
      const Complex phase = e_frac(compiled.evaluate_mod(b, f.q, reduced) * f.a % f.q, f.q);
      const double p = profile(x);
      samples.push_back({path_i(x), phase * p, p, phase});
      max_profile = std::max(max_profile, std::abs(p));
      // images x + G n, n in {-1, 0, 1}^d \ {0}
      double alias = 0;
      std::vector<int> n(d, -1);
      while (true) {
        if (std::any_of(n.begin(), n.end(), [](int v) { return v != 0; })) {
          for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + n[i] * G;
          alias += std::abs(profile(y));
        }
        std::size_t i = d;
        while (i > 0 && n[i - 1] == 1) n[--i] = -1;
        if (i == 0) break;
        ++n[i - 1];
      }
      out.aliasing_estimate = std::max(out.aliasing_estimate, 2 * alias);
    }
    std::size_t i = d;
    while (i > 0 && x[i - 1] == R) x[--i] = -R;
    if (i == 0) break;
    ++x[i - 1];
  }
  {
    std::lock_guard lock(fft::planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);

  for (const auto& s : samples) {
    out.max_discrepancy = std::max(out.max_discrepancy, std::abs(s.k_i - s.k_ii));
    out.max_kernel = std::max(out.max_kernel, std::abs(s.k_ii));
    if (std::abs(s.profile) > 1e-3 * max_profile)
      out.max_phase_error = std::max(out.max_phase_error, std::abs(s.k_i / s.profile - s.phase));
  }
  out.points = samples.size();
  out.error_estimate = out.aliasing_estimate + 1e-10 * out.max_kernel + 1e-14;
  return out;
}

std::string to_string(Truncation t) { return t == Truncation::ceiling ? "ceiling" : "floor"; }

}  // namespace restrictlab
