#include "restrictlab/expsums.hpp"

#include "restrictlab/compiled_form.hpp"

#include "fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>

namespace restrictlab {

namespace {

std::int64_t mod(std::int64_t x, std::int64_t q) {
  std::int64_t r = x % q;
  return r < 0 ? r + q : r;
}

std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t q) {
  return static_cast<std::int64_t>((static_cast<__int128>(a) * b) % q);
}

// e(r/q) for r = 0..q-1.
std::vector<Complex> phase_table(std::int64_t q) {
  std::vector<Complex> t(static_cast<std::size_t>(q));
  for (std::int64_t r = 0; r < q; ++r) t[static_cast<std::size_t>(r)] = e_frac(r, q);
  return t;
}

std::uint64_t checked_cells(std::int64_t q, std::size_t d, std::uint64_t budget) {
  long double cells = std::pow(static_cast<long double>(q), static_cast<long double>(d));
  if (cells > static_cast<long double>(budget))
    throw BudgetExceeded("q^d = " + std::to_string(static_cast<double>(cells)) + " exceeds budget");
  return static_cast<std::uint64_t>(cells);
}

// Odometer over [0, q)^d.
bool advance(std::vector<std::int64_t>& b, std::int64_t q) {
  for (std::size_t i = b.size(); i-- > 0;) {
    if (++b[i] < q) return true;
    b[i] = 0;
  }
  return false;
}

}  // namespace

Complex e(double t) {
  t -= std::round(t);
  const double angle = -2 * std::numbers::pi * t;
  return {std::cos(angle), std::sin(angle)};
}

Complex e_frac(std::int64_t r, std::int64_t q) {
  r = mod(r, q);
  // symmetric representative keeps the angle in [-pi, pi]
  if (2 * r > q) r -= q;
  const double angle = -2 * std::numbers::pi * (static_cast<double>(r) / static_cast<double>(q));
  return {std::cos(angle), std::sin(angle)};
}

FractionAQ::FractionAQ(std::int64_t a_, std::int64_t q_) : a(a_), q(q_) {
  if (q < 1) throw InputError("fraction denominator must be positive");
  if (q == 1) {
    if (a != 0) throw InputError("q = 1 admits only a = 0");
    return;
  }
  if (a < 1 || a >= q || std::gcd(a, q) != 1)
    throw InputError("a/q needs 1 <= a < q with gcd(a, q) = 1: got " + std::to_string(a) + "/" + std::to_string(q));
}

std::vector<FractionAQ> unit_fractions(std::int64_t q) {
  if (q < 1) throw InputError("fraction denominator must be positive");
  if (q == 1) return {FractionAQ(0, 1)};
  std::vector<FractionAQ> out;
  for (std::int64_t a = 1; a < q; ++a)
    if (std::gcd(a, q) == 1) out.emplace_back(a, q);
  return out;
}

Complex gauss_sum(const IntegerForm& form, const FractionAQ& f, std::span<const std::int64_t> m) {
  const std::size_t d = form.arity();
  if (m.size() != d) throw InputError("frequency vector has wrong length");
  const std::int64_t q = f.q;
  checked_cells(q, d, default_budget());
  CompiledForm compiled(form, 0);
  const auto reduced = compiled.reduced_coefficients(q);
  const auto table = phase_table(q);
  std::vector<std::int64_t> mr(d);
  for (std::size_t i = 0; i < d; ++i) mr[i] = mod(m[i], q);
  std::vector<std::int64_t> b(d, 0);
  Complex sum = 0;
  do {
    std::int64_t r = mulmod(f.a, compiled.evaluate_mod(b, q, reduced), q);
    for (std::size_t i = 0; i < d; ++i) r = (r + mulmod(b[i], mr[i], q)) % q;
    sum += table[static_cast<std::size_t>(r)];
  } while (advance(b, q));
  return sum / std::pow(static_cast<double>(q), static_cast<double>(d));
}

Complex WeylSumTable::at(std::span<const std::int64_t> m) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < dim; ++i) idx = idx * static_cast<std::size_t>(fraction.q) + static_cast<std::size_t>(mod(m[i], fraction.q));
  return values[idx];
}

WeylSumTable gauss_sum_table(const IntegerForm& form, const FractionAQ& f, std::uint64_t budget) {
  const std::size_t d = form.arity();
  const std::int64_t q = f.q;
  const std::uint64_t cells = checked_cells(q, d, budget);
  CompiledForm compiled(form, 0);
  const auto reduced = compiled.reduced_coefficients(q);
  const auto table = phase_table(q);

  auto* in = fftw_alloc_complex(cells);
  auto* out = fftw_alloc_complex(cells);
  std::vector<int> n(d, static_cast<int>(q));
  fftw_plan plan;
  {
    std::lock_guard lock(fft::planner_mutex());
    plan = fftw_plan_dft(static_cast<int>(d), n.data(), in, out, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  std::vector<std::int64_t> b(d, 0);
  std::size_t idx = 0;
  do {
    const Complex v = table[static_cast<std::size_t>(mulmod(f.a, compiled.evaluate_mod(b, q, reduced), q))];
    in[idx][0] = v.real();
    in[idx][1] = v.imag();
    ++idx;
  } while (advance(b, q));
  fftw_execute(plan);

  WeylSumTable result{f, d, {}};
  result.values.resize(cells);
  const double scale = 1.0 / static_cast<double>(cells);
  for (std::size_t i = 0; i < cells; ++i) result.values[i] = Complex(out[i][0], out[i][1]) * scale;
  {
    std::lock_guard lock(fft::planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return result;
}

Complex gauss_sum_1d(std::int64_t c, unsigned k, const FractionAQ& f, std::int64_t m) {
  const std::int64_t q = f.q;
  const std::int64_t ac = mulmod(f.a, mod(c, q), q), mr = mod(m, q);
  Complex sum = 0;
  for (std::int64_t b = 0; b < q; ++b) {
    std::int64_t p = 1;
    for (unsigned i = 0; i < k; ++i) p = mulmod(p, b, q);
    sum += e_frac((mulmod(ac, p, q) + mulmod(b, mr, q)) % q, q);
  }
  return sum / static_cast<double>(q);
}

double fitted_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2) return std::nan("");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : std::nan("");
}

WeylReport weyl_decay_report(const IntegerForm& form, std::int64_t q_max, const Rational& kappa,
                             const WeylOptions& options) {
  if (q_max < 1) throw InputError("q_max must be >= 1");
  const bool diagonal = form.is_diagonal();
  std::vector<std::int64_t> coeffs;
  if (diagonal)
    for (const auto& c : form.pure_power_coefficients()) coeffs.push_back(to_int64(c));
  const double kap = to_double(kappa);
  WeylReport report;
  std::vector<double> lx, ly;
  for (std::int64_t q = 1; q <= q_max; ++q) {
    if (options.odd_only && q > 1 && q % 2 == 0) continue;
    WeylRow row{q, -1, 0, 0};
    for (const auto& f : unit_fractions(q)) {
      double s;
      if (diagonal) {
        // the sup over m factorizes coordinatewise
        s = 1;
        for (auto c : coeffs) {
          double best = 0;
          for (std::int64_t m = 0; m < q; ++m) best = std::max(best, std::abs(gauss_sum_1d(c, form.degree(), f, m)));
          s *= best;
        }
      } else {
        s = 0;
        for (const auto& v : gauss_sum_table(form, f, options.budget).values) s = std::max(s, std::abs(v));
      }
      if (s > row.sup_abs) {
        row.sup_abs = s;
        row.a_at = f.a;
      }
    }
    row.margin = row.sup_abs * std::pow(static_cast<double>(q), kap);
    if (q > 1 && row.sup_abs > 0) {
      lx.push_back(std::log(static_cast<double>(q)));
      ly.push_back(std::log(row.sup_abs));
    }
    report.rows.push_back(row);
  }
  report.slope = fitted_slope(lx, ly);
  return report;
}

Complex pairwise_sum(std::span<const Complex> terms) {
  if (terms.size() <= 8) {
    Complex s = 0;
    for (const auto& t : terms) s += t;
    return s;
  }
  const std::size_t half = terms.size() / 2;
  return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

namespace {

void check_weights(const LatticeSolutionSet& set, std::span<const Complex> weights, std::size_t xi_size) {
  if (xi_size != set.arity()) throw InputError("frequency has wrong dimension");
  if (!weights.empty() && weights.size() != set.size()) throw InputError("weight count does not match solution count");
}

}  // namespace

Complex raw_extension_sum(const LatticeSolutionSet& set, std::span<const Complex> weights, std::span<const double> xi) {
  check_weights(set, weights, xi.size());
  std::vector<Complex> terms(set.size());
  for (std::size_t j = 0; j < set.size(); ++j) {
    auto x = set.point(j);
    double phase = 0;
    for (std::size_t i = 0; i < x.size(); ++i) phase += static_cast<double>(x[i]) * xi[i];
    terms[j] = (weights.empty() ? Complex(1) : weights[j]) * e(phase);
  }
  return pairwise_sum(terms);
}

Complex raw_extension_sum(const LatticeSolutionSet& set, std::span<const Complex> weights,
                          std::span<const Rational> xi) {
  check_weights(set, weights, xi.size());
  BigInt den = 1;
  for (const auto& v : xi) den = lcm(den, BigInt(denominator(v)));
  const std::int64_t D = to_int64(den);
  std::vector<std::int64_t> num;
  for (const auto& v : xi) num.push_back(mod(to_int64(numerator(v) * (den / denominator(v))), D));
  std::vector<Complex> terms(set.size());
  for (std::size_t j = 0; j < set.size(); ++j) {
    auto x = set.point(j);
    std::int64_t r = 0;
    for (std::size_t i = 0; i < x.size(); ++i) r = (r + mulmod(mod(x[i], D), num[i], D)) % D;
    terms[j] = (weights.empty() ? Complex(1) : weights[j]) * e_frac(r, D);
  }
  return pairwise_sum(terms);
}

}  // namespace restrictlab
