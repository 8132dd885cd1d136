#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "restrictlab/extension.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <random>

using namespace restrictlab;

namespace {

GradedSystem parabola() { return GradedSystem(1, {{2, {IntegerForm::diagonal(1, 2)}}}); }
GradedSystem cubic() { return GradedSystem(1, {{3, {IntegerForm::diagonal(1, 3)}}}); }
GradedSystem paraboloid() { return GradedSystem(2, {{2, {IntegerForm::diagonal(2, 2)}}}); }

// Random unit-modulus weights on the box |n_i| <= N, not normalized.
WeightFunction box_phases(std::size_t d, std::int64_t N, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1), r(0.5, 2);
  std::map<std::vector<std::int64_t>, Complex> m;
  std::vector<std::int64_t> n(d, -N);
  while (true) {
    m[n] = r(rng) * e(u(rng));
    std::size_t c = d;
    while (c > 0 && n[c - 1] == N) n[--c] = -N;
    if (c == 0) break;
    ++n[c - 1];
  }
  return WeightFunction::explicit_map(std::move(m));
}

constexpr double kInf = std::numeric_limits<double>::infinity();

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("parabola at N = 1") {
  auto grid = grid_eval_graph(parabola(), WeightFunction::indicator_box(1), {16, 16});
  CHECK_FALSE(grid.aliased);
  CHECK(grid.values[0].real() == doctest::Approx(3).epsilon(1e-14));
  CHECK(grid.frequency_bounds == std::vector<std::int64_t>{1, 1});
  auto n4 = lp_norm(grid, 4);
  CHECK(n4.exact);
  CHECK(n4.power_mean == doctest::Approx(15).epsilon(1e-13));
  CHECK(n4.value == doctest::Approx(std::pow(15.0, 0.25)).epsilon(1e-13));
  auto m = even_moment_exact(parabola(), WeightFunction::indicator_box(1), 2);
  REQUIRE(m.exact);
  CHECK(*m.exact == 15);
  CHECK(*even_moment_exact(parabola(), WeightFunction::indicator_box(1), 1).exact == 3);
}

TEST_CASE("a point mass has unit modulus everywhere") {
  auto circle = IntegerForm::diagonal(2, 2);
  auto set = enumerate_level_set(circle, positivity_certificate(circle), 25);
  auto delta = WeightFunction::explicit_map({{{3, -4}, Complex(1, 0)}});
  auto grid = grid_eval_hypersurface(set, delta, {11, 13});
  for (const auto& v : grid.values) CHECK(std::abs(v) == doctest::Approx(1).epsilon(1e-13));
  auto ones = grid_eval_hypersurface(set, WeightFunction::indicator_box(5));
  CHECK(ones.values[0].real() == doctest::Approx(12).epsilon(1e-14));
}

TEST_CASE("grid values agree with direct summation") {
  auto sphere = IntegerForm::diagonal(3, 2);
  auto set = enumerate_level_set(sphere, positivity_certificate(sphere), 26);
  std::vector<std::int64_t> flat = set.flat();
  auto w = random_phase_weights(3, flat, 5);
  std::vector<Complex> direct_weights;
  for (std::size_t i = 0; i < set.size(); ++i) direct_weights.push_back(w(set.point(i)));
  auto grid = grid_eval_hypersurface(set, w, {12, 14, 16});
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    std::size_t j[3] = {rng() % 12, rng() % 14, rng() % 16};
    std::vector<Rational> xi{Rational(j[0], 12), Rational(j[1], 14), Rational(j[2], 16)};
    Complex direct = raw_extension_sum(set, direct_weights, xi);
    Complex g = grid.values[(j[0] * 14 + j[1]) * 16 + j[2]];
    CHECK(std::abs(g - direct) < 1e-9);
  }
}

TEST_CASE("Parseval on no-aliasing grids") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    auto w = box_phases(1, 4, seed);
    double l2 = 0;
    for (const auto& [n, v] : w.entries()) l2 += std::norm(v);
    for (const auto& sys : {parabola(), cubic()}) {
      auto grid = grid_eval_graph(sys, w, {}, {.moment_order = 1});
      CHECK(rel(std::pow(lp_norm(grid, 2).value, 2), l2) < 1e-9);
      CHECK(rel(l2_norm_squared(sys, w), l2) < 1e-12);
      double sup = 0;
      for (const auto& [n, v] : w.entries()) sup += std::abs(v);
      for (const auto& v : grid.values) CHECK(std::abs(v) <= sup * (1 + 1e-12));
    }
  }
  auto w2 = box_phases(2, 2, 9);
  double l2 = 0;
  for (const auto& [n, v] : w2.entries()) l2 += std::norm(v);
  CHECK(rel(std::pow(lp_norm(grid_eval_graph(paraboloid(), w2), 2).value, 2), l2) < 1e-9);
}

TEST_CASE("even moments: grid against counting") {
  struct Case {
    GradedSystem sys;
    std::int64_t N;
    unsigned l;
  };
  std::vector<Case> cases{{parabola(), 3, 2}, {parabola(), 5, 3}, {cubic(), 4, 2}, {cubic(), 3, 3}, {paraboloid(), 2, 2}};
  for (const auto& c : cases) {
    for (auto w : {WeightFunction::indicator_box(c.N), WeightFunction::smooth_cutoff(c.N)}) {
      auto grid = grid_eval_graph(c.sys, w, {}, {.moment_order = c.l});
      auto lp = lp_norm(grid, 2.0 * c.l);
      CHECK(lp.exact);
      auto m = even_moment_exact(c.sys, w, c.l);
      REQUIRE(m.exact);
      CHECK(rel(lp.power_mean, to_double(*m.exact)) < 1e-8);
    }
  }
}

TEST_CASE("complex weights: fourth moment against the quadruple sum") {
  auto w = box_phases(1, 3, 21);
  std::vector<std::pair<std::int64_t, Complex>> pts(w.entries().size());
  std::size_t i = 0;
  for (const auto& [n, v] : w.entries()) pts[i++] = {n[0], v};
  Complex brute = 0;
  for (auto& a : pts)
    for (auto& b : pts)
      for (auto& c : pts)
        for (auto& d : pts)
          if (a.first + b.first == c.first + d.first &&
              a.first * a.first + b.first * b.first == c.first * c.first + d.first * d.first)
            brute += a.second * b.second * std::conj(c.second * d.second);
  auto m = even_moment_exact(parabola(), w, 2);
  CHECK_FALSE(m.exact);
  CHECK(std::abs(brute.imag()) < 1e-9);
  CHECK(rel(m.value, brute.real()) < 1e-10);
  CHECK(rel(lp_norm(grid_eval_graph(parabola(), w), 4).power_mean, brute.real()) < 1e-8);
}

TEST_CASE("circle quadruples") {
  auto circle = IntegerForm::diagonal(2, 2);
  auto set = enumerate_level_set(circle, positivity_certificate(circle), 25);
  REQUIRE(set.size() == 12);
  std::uint64_t quadruples = 0;
  for (std::size_t a = 0; a < 12; ++a)
    for (std::size_t b = 0; b < 12; ++b)
      for (std::size_t c = 0; c < 12; ++c)
        for (std::size_t d = 0; d < 12; ++d) {
          auto x1 = set.point(a), x2 = set.point(b), x3 = set.point(c), x4 = set.point(d);
          if (x1[0] + x2[0] == x3[0] + x4[0] && x1[1] + x2[1] == x3[1] + x4[1]) ++quadruples;
        }
  auto m = even_moment_exact(set, WeightFunction::indicator_box(5), 2);
  REQUIRE(m.exact);
  CHECK(*m.exact == quadruples);
  auto grid = grid_eval_hypersurface(set, WeightFunction::indicator_box(5));
  CHECK(rel(lp_norm(grid, 4).power_mean, static_cast<double>(quadruples)) < 1e-12);
  // a smooth cutoff equal to 1 on the circle gives the same count
  CHECK(*even_moment_exact(set, WeightFunction::smooth_cutoff(5), 2).exact == quadruples);
}

TEST_CASE("modulation leaves every norm unchanged") {
  auto w = box_phases(1, 4, 33);
  const std::vector<std::size_t> sizes{18, 36};
  std::map<std::vector<std::int64_t>, Complex> shifted;
  for (const auto& [n, v] : w.entries()) shifted[n] = v * e_frac(5 * n[0], 18);
  auto g0 = grid_eval_graph(parabola(), w, sizes);
  auto g1 = grid_eval_graph(parabola(), WeightFunction::explicit_map(shifted), sizes);
  // translation by 5 on the linear axis
  for (std::size_t j = 0; j < 18; ++j)
    for (std::size_t k = 0; k < 36; ++k)
      CHECK(std::abs(g1.values[j * 36 + k] - g0.values[((j + 5) % 18) * 36 + k]) < 1e-10);
  for (double p : {1.0, 3.0, 4.0, 7.5, kInf})
    CHECK(rel(lp_norm(g1, p).value, lp_norm(g0, p).value) < 1e-12);
}

TEST_CASE("doubling the weights doubles every norm") {
  auto w = box_phases(2, 2, 8);
  std::map<std::vector<std::int64_t>, Complex> twice;
  for (const auto& [n, v] : w.entries()) twice[n] = 2.0 * v;
  auto g1 = grid_eval_graph(paraboloid(), w);
  auto g2 = grid_eval_graph(paraboloid(), WeightFunction::explicit_map(twice));
  for (double p : {1.0, 2.0, 3.0, 4.0, kInf}) CHECK(lp_norm(g2, p).value == 2 * lp_norm(g1, p).value);
}

TEST_CASE("constants and error estimates") {
  TorusGridFunction c{{8, 6}, std::vector<Complex>(48, Complex(0, -3)), {0, 0}, {0, 0}, false};
  for (double p : {1.0, 2.5, 4.0, kInf}) {
    auto n = lp_norm(c, p);
    CHECK(n.value == doctest::Approx(3).epsilon(1e-14));
    REQUIRE(n.error_estimate);
    CHECK(*n.error_estimate < 1e-13);
  }
  // non-even p is not exact, and a fine grid has a small two-grid difference
  auto grid = grid_eval_graph(parabola(), WeightFunction::indicator_box(3), {64, 64});
  auto n3 = lp_norm(grid, 3);
  CHECK_FALSE(n3.exact);
  REQUIRE(n3.error_estimate);
  CHECK(*n3.error_estimate < 0.05 * n3.value);
  CHECK_THROWS_AS(lp_norm(grid, 0.5), InputError);
}

TEST_CASE("aliasing and budget") {
  auto small = grid_eval_graph(parabola(), WeightFunction::indicator_box(3), {4, 4});
  CHECK(small.aliased);
  CHECK(small.exact_even_order() == 0);
  auto ok = grid_eval_graph(parabola(), WeightFunction::indicator_box(3));
  CHECK_FALSE(ok.aliased);
  CHECK(ok.exact_even_order() >= 2);
  CHECK(exact_grid_sizes(std::vector<std::int64_t>{6, 9}, 2) == std::vector<std::size_t>{14, 20});
  CHECK_THROWS_AS(grid_eval_graph(parabola(), WeightFunction::indicator_box(3), {1000, 1000}, {.budget = 1000}),
                  BudgetExceeded);
  CHECK_THROWS_AS(grid_eval_graph(parabola(), WeightFunction::indicator_box(3), {16}), InputError);
}

TEST_CASE("ratio reports") {
  auto sphere = IntegerForm::diagonal(4, 2);
  auto cert = positivity_certificate(sphere);
  const std::vector<double> ps{2, 4, kInf};
  auto report = ratio_report_hypersurface(sphere, cert, 1, 12, ps, {.random_draws = 1});
  CHECK(report.rows.size() == 12 * 2 * 3);
  auto counts = count_series(sphere, cert, 1, 12);
  for (const auto& r : report.rows) {
    if (r.p == 2) CHECK(r.ratio <= 1 + 1e-12);
    if (std::isinf(r.p) && r.weights == "uniform") {
      const double n = static_cast<double>(counts.entries[static_cast<std::size_t>(r.scale - 1)].count);
      CHECK(rel(r.ratio, n / ((1 + std::pow(r.scale, 0.5)) * std::sqrt(n))) < 1e-12);
    }
    CHECK(r.running_max >= r.ratio);
    CHECK(std::isfinite(r.ratio));
  }
  REQUIRE(report.trends.size() == 3);
  CHECK(report.trends[0].max_ratio <= 1 + 1e-12);
  // repeatable
  auto again = ratio_report_hypersurface(sphere, cert, 1, 12, ps, {.random_draws = 1});
  for (std::size_t i = 0; i < report.rows.size(); ++i) CHECK(again.rows[i].norm == report.rows[i].norm);

  auto circle = IntegerForm::diagonal(2, 2);
  auto gaps = ratio_report_hypersurface(circle, positivity_certificate(circle), 1, 6, ps, {.random_draws = 0});
  CHECK(gaps.skipped == std::vector<std::int64_t>{3, 6});

  auto graph = ratio_report_graph(parabola(), 1, 6, std::vector<double>{6}, {.random_draws = 1});
  CHECK(graph.rows.size() == 12);
  REQUIRE(graph.trends[0].slope);
  CHECK(graph.flagged == 0);
}
