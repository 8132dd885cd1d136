#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "restrictlab/bump.hpp"
#include "restrictlab/magyar.hpp"

#include <bit>
#include <random>

using namespace restrictlab;

namespace {

IntegerForm make(std::size_t d, std::vector<std::pair<long, std::vector<unsigned>>> terms) {
  std::vector<MonomialTerm> t;
  for (auto& [c, e] : terms) t.push_back({BigInt(c), e});
  return IntegerForm(d, std::move(t));
}

MagyarDecomposition sphere(std::size_t d, std::size_t budget, Truncation t = Truncation::ceiling) {
  auto f = IntegerForm::diagonal(d, 2);
  return MagyarDecomposition(f, build_quadrature(f, positivity_certificate(f), budget, QuadratureScheme::product_angles),
                             t);
}

}  // namespace

TEST_CASE("bump and Littlewood-Paley pieces") {
  std::vector<double> zero{0, 0};
  CHECK(bump::psi(zero) == 1);
  std::vector<double> edge{0.125, 0.01};
  CHECK(bump::psi(edge) == 0);
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> num(-300, 300);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Rational> xi{Rational(num(rng), 1000), Rational(num(rng), 1000), Rational(num(rng), 1000)};
    const int j_max = 1 + trial % 6;
    Rational sum = 0;
    for (int j = 0; j <= j_max; ++j) sum += bump::lp_piece(j, j_max, xi);
    CHECK(sum == bump::psi(xi));
  }
  // derivatives up to order 3 vanish at both knots
  for (double knot : {1.0 / 16, 1.0 / 8})
    for (int k = 1; k <= 3; ++k) CHECK(std::abs(bump::chi_derivative(knot, k)) < 1e-9);
}

TEST_CASE("dyadic shells") {
  CHECK(shell_limit(25, 2) == 3);
  CHECK(shell_limit(25, 2, Truncation::floor) == 2);
  CHECK(shell_limit(16, 2) == 2);
  CHECK(shell_limit(16, 2, Truncation::floor) == 2);
  CHECK(shell_limit(1, 3) == 0);
  const int S = shell_limit(200, 2);
  std::vector<int> seen(std::size_t{1} << (S + 1), 0);
  for (int s = 0; s <= S; ++s)
    for (const auto& f : fraction_shell(s)) {
      CHECK(f.q >= (std::int64_t{1} << s));
      CHECK(f.q < (std::int64_t{1} << (s + 1)));
      if (f.a <= 1) ++seen[static_cast<std::size_t>(f.q)];
    }
  for (std::size_t q = 1; q < seen.size(); ++q) CHECK(seen[q] == 1);
  CHECK(fraction_shell(0) == std::vector<FractionAQ>{FractionAQ(0, 1)});
}

TEST_CASE("Gauss sum cache agrees with direct sums") {
  auto mixed = make(2, {{1, {2, 0}}, {1, {1, 1}}, {2, {0, 2}}});
  auto diag = IntegerForm::diagonal(3, 2, {BigInt(1), BigInt(3), BigInt(2)});
  GaussSumCache cm(mixed), cd(diag);
  std::vector<std::int64_t> m2{3, -5}, m3{1, 7, -2};
  for (std::int64_t q : {1, 2, 5, 6}) {
    for (const auto& f : unit_fractions(q)) {
      CHECK(std::abs(cm(f, m2) - gauss_sum(mixed, f, m2)) < 1e-12);
      CHECK(std::abs(cd(f, m3) - gauss_sum(diag, f, m3)) < 1e-12);
    }
  }
}

TEST_CASE("multiplier values and supports") {
  auto m = sphere(3, 20000);
  std::vector<double> zero{0, 0, 0};
  CHECK(std::abs(m.multiplier(50, FractionAQ(0, 1), zero) - Complex(m.quadrature().mass())) < 1e-12);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::int64_t q = 1 + trial % 7;
    auto fracs = unit_fractions(q);
    auto f = fracs[static_cast<std::size_t>(trial) % fracs.size()];
    std::vector<double> xi{u(rng), u(rng), u(rng)};
    // distance to (1/q)Z on some axis beyond 1/(8 2^s) forces zero
    const double s_scale = std::ldexp(1.0, 63 - std::countl_zero(static_cast<std::uint64_t>(q)));
    bool outside = false;
    for (double x : xi) {
      const double dist = std::abs(x * q - std::round(x * q)) / q;
      outside = outside || dist >= 1.0 / (8 * s_scale);
    }
    if (outside) CHECK(m.multiplier(40, f, xi) == Complex(0));
  }
}

TEST_CASE("decomposition identity and the xi = 0 main term") {
  auto f = IntegerForm::diagonal(5, 2);
  auto cert = positivity_certificate(f);
  auto m = sphere(5, 2 * 12 * 12 * 12 * 12);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (std::int64_t lambda : {30, 77}) {
    auto set = enumerate_level_set(f, cert, lambda);
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<double> xi(5);
      for (auto& x : xi) x = u(rng) / (rep + 1);
      const Complex total = m.scaled_extension(set, xi);
      const Complex sum = m.main_term(lambda, xi) + m.error_term(set, xi);
      CHECK(std::abs(sum - total) <= 1e-9 * std::max(1.0, std::abs(total)));
    }
    std::vector<double> zero(5, 0.0);
    const double scaled = m.scaled_extension(set, zero).real();
    CHECK(std::abs(m.error_term(set, zero)) < 0.1 * scaled);
  }
  // the floor rule drops the top shell
  auto mf = sphere(5, 2 * 12 * 12 * 12 * 12, Truncation::floor);
  std::vector<double> zero(5, 0.0);
  CHECK(std::abs(m.main_term(30, zero) - mf.main_term(30, zero)) > 0);
}

TEST_CASE("Spearman correlation") {
  std::vector<double> x{1, 2, 3, 4}, down{9, 7, 5, 1}, tied{1, 1, 2, 2};
  CHECK(spearman_correlation(x, down) == doctest::Approx(-1));
  CHECK(spearman_correlation(x, x) == doctest::Approx(1));
  CHECK(spearman_correlation(x, tied) == doctest::Approx(0.894427191));
  CHECK(std::isnan(spearman_correlation(std::span<const double>(x).first(1), std::span<const double>(x).first(1))));
}

TEST_CASE("minor arc report bookkeeping") {
  auto f = IntegerForm::diagonal(3, 2);
  auto cert = positivity_certificate(f);
  auto m = sphere(3, 5000);
  std::vector<std::vector<double>> xis{{0, 0, 0}, {0.1, 0, 0}};
  std::vector<std::int64_t> none, one{30}, two{30, 60};
  CHECK(minor_arc_report(m, cert, none, xis, Rational(1, 24)).rows.empty());
  auto single = minor_arc_report(m, cert, one, xis, Rational(1, 24));
  CHECK(single.rows.size() == 1);
  CHECK_FALSE(single.slope.has_value());
  auto ref = sphere(3, 20000);
  auto pair = minor_arc_report(m, cert, two, xis, Rational(1, 24), {.reference = &ref});
  CHECK(pair.slope.has_value());
  CHECK(pair.rows[0].quadrature_error.has_value());
}

TEST_CASE("kernel identity on the circle") {
  auto m = sphere(2, 256);
  for (std::int64_t q : {1, 3}) {
    auto f = unit_fractions(q).back();
    auto k = kernel_identity_check(m, 25, f, 0);
    CHECK(k.within_estimate());
    CHECK(k.max_kernel > 1e-3);
    CHECK(k.max_phase_error < 0.05);
  }
  CHECK_THROWS_AS(kernel_identity_check(m, 25, FractionAQ(0, 1), 0, {.grid = 16}), InputError);
}
