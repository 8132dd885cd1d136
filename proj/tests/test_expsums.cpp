#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "restrictlab/expsums.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace restrictlab;

namespace {

IntegerForm make(std::size_t d, std::vector<std::pair<long, std::vector<unsigned>>> terms) {
  std::vector<MonomialTerm> t;
  for (auto& [c, e] : terms) t.push_back({BigInt(c), e});
  return IntegerForm(d, std::move(t));
}

// Unreduced reference: phases from exact integer values, reduced only by fmod at the end.
Complex reference_gauss_sum(const IntegerForm& f, std::int64_t a, std::int64_t q, std::vector<std::int64_t> m) {
  const std::size_t d = f.arity();
  std::vector<std::int64_t> b(d, 0);
  Complex s = 0;
  std::size_t count = 0;
  while (true) {
    BigInt v = a * f.evaluate(std::span<const std::int64_t>(b));
    for (std::size_t i = 0; i < d; ++i) v += b[i] * m[i];
    BigInt r = v % q;
    if (r < 0) r += q;
    s += std::polar(1.0, -2 * std::numbers::pi * r.convert_to<double>() / static_cast<double>(q));
    ++count;
    std::size_t i = d;
    while (i > 0 && b[i - 1] == q - 1) b[--i] = 0;
    if (i == 0) break;
    ++b[i - 1];
  }
  return s / static_cast<double>(count);
}

IntegerForm random_form(std::mt19937_64& rng, std::size_t d, unsigned k) {
  std::uniform_int_distribution<int> coeff(-6, 6), var(0, static_cast<int>(d) - 1);
  std::vector<MonomialTerm> terms;
  for (int i = 0; i < 4; ++i) {
    std::vector<unsigned> e(d, 0);
    for (unsigned j = 0; j < k; ++j) ++e[static_cast<std::size_t>(var(rng))];
    int c = coeff(rng);
    terms.push_back({BigInt(c == 0 ? 1 : c), e});
  }
  std::vector<unsigned> e(d, 0);
  e[0] = k;
  terms.push_back({BigInt(1), e});
  try {
    return IntegerForm(d, terms);
  } catch (const InputError&) {
    return IntegerForm::diagonal(d, k);
  }
}

}  // namespace

TEST_CASE("fractions") {
  CHECK(unit_fractions(1).size() == 1);
  CHECK(unit_fractions(1)[0] == FractionAQ(0, 1));
  CHECK(unit_fractions(12).size() == 4);
  CHECK_THROWS_AS(FractionAQ(2, 4), InputError);
  CHECK_THROWS_AS(FractionAQ(1, 1), InputError);
  CHECK_THROWS_AS(FractionAQ(0, 3), InputError);
}

TEST_CASE("Gauss sums at small moduli") {
  auto x2 = IntegerForm::diagonal(1, 2);
  std::int64_t zero = 0;
  std::span<const std::int64_t> m0(&zero, 1);
  CHECK(std::abs(gauss_sum(x2, FractionAQ(0, 1), m0) - Complex(1)) < 1e-15);
  CHECK(std::abs(gauss_sum(x2, FractionAQ(1, 2), m0)) < 1e-15);
  CHECK(std::abs(gauss_sum(x2, FractionAQ(1, 3), m0)) == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-13));
  auto t = gauss_sum_table(x2, FractionAQ(1, 3));
  REQUIRE(t.values.size() == 3);
  CHECK(std::abs(t.values[0]) == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-13));
  CHECK(gauss_sum_table(x2, FractionAQ(0, 1)).values == std::vector<Complex>{Complex(1)});

  // x1^2 + x2^2 mod 2 factors as prod (1 + e((1 + m_i)/2)) / 2
  auto circle = IntegerForm::diagonal(2, 2);
  auto c2 = gauss_sum_table(circle, FractionAQ(1, 2));
  for (std::int64_t m1 = 0; m1 < 2; ++m1)
    for (std::int64_t m2 = 0; m2 < 2; ++m2) {
      std::vector<std::int64_t> m{m1, m2}, neg{-m1, -m2};
      const double expect = (m1 == 1 && m2 == 1) ? 1 : 0;
      CHECK(std::abs(c2.at(m) - Complex(expect)) < 1e-14);
      CHECK(std::abs(c2.at(neg) - std::conj(c2.at(m))) < 1e-14);
    }
}

TEST_CASE("direct and table paths agree with the unreduced reference") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 1 + trial % 3;
    const unsigned k = 2 + trial % 3;
    auto f = random_form(rng, d, k);
    const std::int64_t q = 2 + trial % 9;
    auto fracs = unit_fractions(q);
    auto fr = fracs[static_cast<std::size_t>(trial) % fracs.size()];
    auto table = gauss_sum_table(f, fr);
    std::uniform_int_distribution<std::int64_t> mm(-20, 20);
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<std::int64_t> m(d);
      for (auto& v : m) v = mm(rng);
      auto direct = gauss_sum(f, fr, m);
      CHECK(std::abs(direct - reference_gauss_sum(f, fr.a, q, m)) < 1e-12);
      CHECK(std::abs(direct - table.at(m)) < 1e-9);
      CHECK(std::abs(direct) <= 1 + 1e-12);
      // G(q - a, q; -m) = conj G(a, q; m)
      std::vector<std::int64_t> neg(d);
      for (std::size_t i = 0; i < d; ++i) neg[i] = -m[i];
      CHECK(std::abs(gauss_sum(f, FractionAQ(q - fr.a, q), neg) - std::conj(direct)) < 1e-12);
    }
  }
}

TEST_CASE("diagonal factorization matches the full sum") {
  auto f = IntegerForm::diagonal(3, 3, {BigInt(2), BigInt(1), BigInt(5)});
  std::vector<std::int64_t> m{1, 4, 2};
  for (std::int64_t q : {4, 7, 9}) {
    auto fr = unit_fractions(q).back();
    Complex prod = gauss_sum_1d(2, 3, fr, 1) * gauss_sum_1d(1, 3, fr, 4) * gauss_sum_1d(5, 3, fr, 2);
    CHECK(std::abs(prod - gauss_sum(f, fr, m)) < 1e-12);
  }
}

TEST_CASE("Weyl decay reports") {
  auto x2 = IntegerForm::diagonal(1, 2);
  auto r = weyl_decay_report(x2, 31, Rational(1, 2), {.odd_only = true});
  CHECK(r.rows.front().q == 1);
  CHECK(r.rows.front().sup_abs == doctest::Approx(1));
  for (const auto& row : r.rows) {
    CHECK(row.sup_abs == doctest::Approx(std::pow(row.q, -0.5)).epsilon(1e-10));
    CHECK(row.margin == doctest::Approx(1).epsilon(1e-10));
  }
  CHECK(r.slope == doctest::Approx(-0.5).epsilon(1e-9));

  auto five = IntegerForm::diagonal(5, 2);
  auto r5 = weyl_decay_report(five, 7, Rational(5, 2), {.odd_only = true});
  for (const auto& row : r5.rows) CHECK(row.sup_abs == doctest::Approx(std::pow(row.q, -2.5)).epsilon(1e-10));
  // the factorized sup agrees with the table sup
  for (std::int64_t q : {3, 5}) {
    double best = 0;
    for (const auto& fr : unit_fractions(q))
      for (const auto& v : gauss_sum_table(five, fr).values) best = std::max(best, std::abs(v));
    CHECK(best == doctest::Approx(std::pow(q, -2.5)).epsilon(1e-10));
  }

  // non-diagonal form takes the table path
  auto mixed = make(2, {{1, {2, 0}}, {1, {1, 1}}, {1, {0, 2}}});
  auto rm = weyl_decay_report(mixed, 9, Rational(1));
  for (const auto& row : rm.rows) CHECK(row.sup_abs <= 1 + 1e-12);
}

TEST_CASE("raw extension sums") {
  auto q = IntegerForm::diagonal(2, 2);
  auto set = enumerate_level_set(q, positivity_certificate(q), 25);
  std::vector<double> zero{0, 0}, half{0.5, 0.5};
  CHECK(std::abs(raw_extension_sum(set, {}, zero) - Complex(12)) < 1e-12);
  CHECK(std::abs(raw_extension_sum(set, {}, half) - Complex(-12)) < 1e-12);
  std::vector<Rational> rhalf{Rational(1, 2), Rational(-1, 2)};
  CHECK(std::abs(raw_extension_sum(set, {}, rhalf) - Complex(-12)) < 1e-12);

  std::vector<Complex> delta(set.size(), 0);
  delta[3] = 1;
  std::vector<double> xi{0.1234, -0.377};
  auto v = raw_extension_sum(set, delta, xi);
  CHECK(std::abs(v) == doctest::Approx(1));
  const double phase = set.point(3)[0] * xi[0] + set.point(3)[1] * xi[1];
  CHECK(std::abs(v - e(phase)) < 1e-14);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<Complex> w(set.size());
  double l1 = 0;
  for (auto& x : w) {
    x = u(rng);
    l1 += std::abs(x);
  }
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> p{u(rng), u(rng)}, n{-p[0], -p[1]};
    auto a = raw_extension_sum(set, w, p);
    CHECK(std::abs(a - std::conj(raw_extension_sum(set, w, n))) < 1e-12);
    CHECK(std::abs(a) <= l1 + 1e-12);
    CHECK(std::abs(raw_extension_sum(set, {}, p)) <= 12 + 1e-12);
  }
  // rational and double paths agree
  std::vector<Rational> rx{Rational(3, 7), Rational(-2, 11)};
  std::vector<double> dx{3.0 / 7, -2.0 / 11};
  CHECK(std::abs(raw_extension_sum(set, w, rx) - raw_extension_sum(set, w, dx)) < 1e-12);
}
