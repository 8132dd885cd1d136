#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "restrictlab/form_io.hpp"
#include "restrictlab/forms.hpp"

#include <cmath>
#include <random>

using namespace restrictlab;

namespace {

IntegerForm make(std::size_t d, std::vector<std::pair<long, std::vector<unsigned>>> terms) {
  std::vector<MonomialTerm> t;
  for (auto& [c, e] : terms) t.push_back({BigInt(c), e});
  return IntegerForm(d, std::move(t));
}

IntegerForm random_form(std::mt19937_64& rng, std::size_t d, unsigned k, int nterms) {
  std::uniform_int_distribution<int> coeff(-9, 9), var(0, static_cast<int>(d) - 1);
  std::vector<MonomialTerm> terms;
  for (int i = 0; i < nterms; ++i) {
    std::vector<unsigned> e(d, 0);
    for (unsigned j = 0; j < k; ++j) ++e[static_cast<std::size_t>(var(rng))];
    int c = coeff(rng);
    terms.push_back({BigInt(c == 0 ? 1 : c), e});
  }
  terms.push_back({BigInt(1), [&] { std::vector<unsigned> e(d, 0); e[0] = k; return e; }()});
  try {
    return IntegerForm(d, terms);
  } catch (const InputError&) {
    return IntegerForm::diagonal(d, k);
  }
}

}  // namespace

TEST_CASE("evaluate") {
  auto circle = IntegerForm::diagonal(2, 2);
  std::vector<std::int64_t> p{3, 4};
  CHECK(circle.evaluate(p) == 25);
  auto cubes = IntegerForm::diagonal(2, 3);
  std::vector<std::int64_t> q{1, 2};
  CHECK(cubes.evaluate(q) == 9);
  auto f = make(3, {{2, {1, 1, 0}}, {-5, {0, 0, 2}}});
  std::vector<std::int64_t> zero{0, 0, 0};
  CHECK(f.evaluate(zero) == 0);
  std::vector<std::int64_t> bad{1, 2};
  CHECK_THROWS_AS(f.evaluate(bad), InputError);
}

TEST_CASE("construction rejects inhomogeneous and normalizes terms") {
  CHECK_THROWS_AS(make(2, {{1, {2, 0}}, {1, {1, 0}}}), InputError);
  CHECK_THROWS_AS(make(2, {{1, {2, 0}}, {-1, {2, 0}}}), InputError);
  auto f = make(2, {{1, {2, 0}}, {3, {0, 2}}, {1, {2, 0}}});
  REQUIRE(f.terms().size() == 2);
  CHECK(f.terms()[0].exponents == std::vector<unsigned>{0, 2});
  CHECK(f.terms()[1].coefficient == 2);
}

TEST_CASE("gradient and jacobian") {
  auto circle = IntegerForm::diagonal(2, 2);
  std::vector<Rational> p{3, 4};
  auto g = circle.gradient(p);
  CHECK(g[0] == 6);
  CHECK(g[1] == 8);

  std::vector<IntegerForm> block{make(2, {{1, {2, 0}}}), make(2, {{1, {1, 1}}})};
  std::vector<Rational> ones{1, 1};
  auto j = jacobian(block, ones);
  CHECK(j(0, 0) == 2);
  CHECK(j(0, 1) == 0);
  CHECK(j(1, 0) == 1);
  CHECK(j(1, 1) == 1);
  CHECK(j.rank() == 2);

  auto f = make(3, {{2, {1, 1, 0}}, {-5, {0, 0, 2}}, {7, {0, 1, 1}}});
  std::vector<Rational> zero(3, Rational(0));
  for (const auto& v : f.gradient(zero)) CHECK(v == 0);
}

TEST_CASE("homogeneity and Euler identity on random points") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coord(-20, 20), den(1, 9);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t d = 1 + trial % 4;
    unsigned k = 2 + static_cast<unsigned>(trial % 3);
    auto f = random_form(rng, d, k, 4);
    std::vector<std::int64_t> x(d), tx(d);
    std::int64_t t = coord(rng);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = coord(rng);
      tx[i] = t * x[i];
    }
    CHECK(f.evaluate(tx) == ipow(BigInt(t), f.degree()) * f.evaluate(x));

    std::vector<Rational> xr(d);
    for (auto& v : xr) v = Rational(coord(rng), den(rng));
    auto g = f.gradient(xr);
    Rational dot = 0;
    for (std::size_t i = 0; i < d; ++i) dot += xr[i] * g[i];
    CHECK(dot == Rational(f.degree()) * f.evaluate(xr));
  }
}

TEST_CASE("parameter report for the 9-dimensional sphere") {
  auto sphere = IntegerForm::diagonal(9, 2);
  auto rep = parameter_report(sphere);
  REQUIRE(rep.hypersurface);
  const auto& h = *rep.hypersurface;
  CHECK(h.singular_dimension == 0);
  CHECK(h.kappa == Rational(9, 2));
  // (1/12)(9/4 - 1); independently evaluated with Python fractions
  CHECK(h.gamma == Rational(5, 48));
  CHECK(*h.p_critical == Rational(18, 7));
  CHECK(*h.threshold_main == Rational(202, 5));
  CHECK(*h.threshold_major_arcs == Rational(2) + Rational(4) / Rational(5, 2));
  CHECK(h.birch_criterion_holds);
  REQUIRE(rep.blocks.size() == 1);
  CHECK(rep.blocks[0].chi == 128);
  CHECK(chi_constant(2, 1, 1, 2) == 128);
  CHECK(chi_constant(3, 2, 3, 3) == 18432);
}

TEST_CASE("diagonal quartic in 97 variables satisfies Birch's criterion") {
  auto q = IntegerForm::diagonal(97, 4);
  auto rep = parameter_report(q);
  CHECK(rep.hypersurface->singular_dimension == 0);
  CHECK(rep.hypersurface->birch_criterion_holds);
  CHECK(rep.hypersurface->kappa == Rational(97, 24));
  CHECK(rep.hypersurface->gamma == Rational(49, 1152));

  auto q96 = IntegerForm::diagonal(48, 4);
  CHECK_FALSE(parameter_report(q96).hypersurface->birch_criterion_holds);
}

TEST_CASE("parameter report errors and declared dimensions") {
  CHECK_THROWS_AS(parameter_report(IntegerForm::diagonal(3, 1)), InputError);
  auto mixed = make(3, {{1, {4, 0, 0}}, {1, {0, 4, 0}}, {1, {0, 0, 4}}, {1, {2, 2, 0}}});
  CHECK_THROWS_AS(parameter_report(mixed), InputError);
  auto rep = parameter_report(mixed, 0);
  CHECK(rep.hypersurface->singular_dimension_source == ValueSource::user_declared);
  CHECK_THROWS_AS(parameter_report(IntegerForm::diagonal(5, 2), 2), InputError);
  CHECK_FALSE(parameter_report(IntegerForm::diagonal(2, 2)).hypersurface->p_critical.has_value());
  CHECK(*parameter_report(IntegerForm::diagonal(3, 2)).hypersurface->p_critical == 6);
}

TEST_CASE("gamma positive iff Birch criterion, and the report is a pure function") {
  for (std::size_t d = 1; d <= 40; ++d)
    for (unsigned k = 2; k <= 4; ++k)
      for (long dim = 0; dim < static_cast<long>(d); dim += 3) {
        auto p = hypersurface_params(d, k, dim, ValueSource::user_declared);
        CHECK((p.gamma > 0) == p.birch_criterion_holds);
        auto again = hypersurface_params(d, k, dim, ValueSource::user_declared);
        CHECK(p.kappa == again.kappa);
        CHECK(p.gamma == again.gamma);
        CHECK(p.threshold_main == again.threshold_main);
      }
}

TEST_CASE("positivity certificates") {
  auto q = make(2, {{1, {2, 0}}, {1, {1, 1}}, {1, {0, 2}}});
  auto c = positivity_certificate(q);
  CHECK(c.method == PositivityMethod::quadratic_exact);
  CHECK(*c.positive_definite);
  CHECK(*c.m_low == Rational(1, 2));

  auto hyperbolic = make(2, {{1, {2, 0}}, {-1, {0, 2}}});
  CHECK_FALSE(*positivity_certificate(hyperbolic).positive_definite);

  auto quartic = IntegerForm::diagonal(2, 4);
  auto cq = positivity_certificate(quartic);
  CHECK(cq.method == PositivityMethod::diagonal_exact);
  CHECK(*cq.m_low == Rational(1, 2));
  // dense-grid oracle for min over the unit circle of x^4 + y^4
  double min_val = 1e9;
  for (int i = 0; i < 200000; ++i) {
    double th = 2 * M_PI * i / 200000.0;
    min_val = std::min(min_val, std::pow(std::cos(th), 4) + std::pow(std::sin(th), 4));
  }
  CHECK(min_val == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(min_val >= to_double(*cq.m_low) - 1e-12);

  auto general = make(2, {{1, {4, 0}}, {1, {0, 4}}, {1, {2, 2}}});
  auto cg = positivity_certificate(general);
  CHECK_FALSE(cg.positive_definite.has_value());
  CHECK_FALSE(cg.usable());
  CHECK(declare_positive_definite(Rational(1, 3)).usable());
  CHECK_THROWS_AS(declare_positive_definite(Rational(0)), InputError);
}

TEST_CASE("certified eigenvalue bound is sound on random positive definite Gram matrices") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> c(-3, 3);
  int certified = 0;
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t d = 2 + trial % 3;
    std::vector<MonomialTerm> terms;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) {
        std::vector<unsigned> e(d, 0);
        ++e[i];
        ++e[j];
        long v = i == j ? 6 + c(rng) : c(rng);
        if (v) terms.push_back({BigInt(v), e});
      }
    IntegerForm f(d, terms);
    auto cert = positivity_certificate(f);
    if (!*cert.positive_definite) continue;
    ++certified;
    RationalMatrix shifted = f.gram_matrix();
    for (std::size_t i = 0; i < d; ++i) shifted(i, i) -= *cert.m_low;
    CHECK(shifted.is_positive_semidefinite());
    CHECK(*cert.m_low > 0);
  }
  CHECK(certified > 20);
}

TEST_CASE("Birch rank of single quadratics") {
  auto r5 = birch_rank_quadratic(IntegerForm::diagonal(5, 2));
  CHECK(r5.birch_rank == 5);
  CHECK(r5.singular_dimension == 0);
  auto x1sq = make(3, {{1, {2, 0, 0}}});
  CHECK(birch_rank_quadratic(x1sq).birch_rank == 1);
  CHECK(birch_rank_quadratic(x1sq).singular_dimension == 2);
  auto hyp = make(2, {{1, {1, 1}}});
  CHECK(hyp.gram_matrix()(0, 1) == Rational(1, 2));
  CHECK(birch_rank_quadratic(hyp).birch_rank == 2);
  CHECK_THROWS_AS(birch_rank_quadratic(IntegerForm::diagonal(3, 4)), InputError);
}

TEST_CASE("direct sum rank check") {
  auto a = direct_sum_rank_check(IntegerForm::diagonal(2, 2), 3);
  CHECK(a.direct_sum_rank == 6);
  CHECK(a.scaled_rank == 6);
  CHECK(a.holds);
  auto b = direct_sum_rank_check(make(2, {{1, {2, 0}}}), 2);
  CHECK(b.direct_sum_rank == 2);
  CHECK(b.scaled_rank == 2);
  auto c = direct_sum_rank_check(make(2, {{1, {1, 1}}}), 4);
  CHECK(c.direct_sum_rank == 8);
  CHECK(c.scaled_rank == 8);
  CHECK(RationalMatrix::identity(2).block_diagonal(3).rank() == 6);
}

TEST_CASE("graded systems") {
  std::vector<IntegerForm> quad{make(3, {{1, {2, 0, 0}}}), make(3, {{1, {0, 1, 1}}})};
  std::vector<IntegerForm> cubic{make(3, {{1, {3, 0, 0}}, {2, {0, 0, 3}}})};
  GradedSystem sys(3, {{2, quad}, {3, cubic}});
  CHECK(sys.total_nonlinear() == 3);
  CHECK(sys.total_degree() == 3 + 2 * 2 + 3 * 1);
  CHECK(sys.max_block_size() == 2);
  CHECK(sys.max_degree() == 3);

  std::vector<IntegerForm> dependent{make(2, {{1, {2, 0}}}), make(2, {{3, {2, 0}}})};
  CHECK_FALSE(is_linearly_independent(dependent));
  CHECK_THROWS_AS(GradedSystem(2, {{2, dependent}}), InputError);
  CHECK_THROWS_AS(GradedSystem(3, {{3, quad}}), InputError);

  auto rep = parameter_report(sys, {{2, 3}});
  REQUIRE(rep.blocks.size() == 2);
  CHECK(rep.blocks[0].birch_rank == 3);
  CHECK(rep.blocks[0].birch_rank_source == ValueSource::user_declared);
  CHECK(rep.blocks[0].rank_at_least_one_certified);
  CHECK(rep.blocks[1].birch_rank == 2);  // diagonal cubic missing x2: d - dim = 3 - 1
  CHECK(rep.blocks[0].chi == chi_constant(2, 2, 3, 3));
  CHECK(rep.moment_exponent_threshold(2) == 8);
  auto ok = rep.birch_even_ok(1000000);
  CHECK(ok[0] == true);
  CHECK(ok[1] == true);
  CHECK(rep.birch_even_ok(2)[0] == false);

  // r_2 = 0 is unconstrained
  GradedSystem cubic_only(3, {{3, cubic}});
  auto rc = parameter_report(cubic_only);
  CHECK(rc.blocks[0].unconstrained());
  CHECK(rc.birch_even_ok(2)[0] == true);
}

TEST_CASE("JSON round trip is byte stable after canonical ordering") {
  std::string text = R"({"arity": 2, "terms": [{"coeff": "1", "exps": [2, 0]}, {"coeff": 3, "exps": [0, 2]},
                         {"coeff": "-12345678901234567890123", "exps": [1, 1]}]})";
  auto parsed = std::get<IntegerForm>(parse_form_or_system(text));
  std::string once = serialize_form(parsed);
  auto reparsed = std::get<IntegerForm>(parse_form_or_system(once));
  CHECK(serialize_form(reparsed) == once);
  CHECK(reparsed == parsed);
  CHECK(once.find("\"-12345678901234567890123\"") != std::string::npos);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    auto f = random_form(rng, 1 + i % 4, 2 + i % 3, 5);
    auto s = serialize_form(f);
    CHECK(serialize_form(std::get<IntegerForm>(parse_form_or_system(s))) == s);
  }

  std::string sys_text = R"({"arity": 1, "blocks": {"2": [{"terms": [{"coeff": "1", "exps": [2]}]}]}})";
  auto sys = std::get<GradedSystem>(parse_form_or_system(sys_text));
  auto s1 = serialize_system(sys);
  CHECK(serialize_system(std::get<GradedSystem>(parse_form_or_system(s1))) == s1);

  CHECK_THROWS_AS(parse_form_or_system("{"), InputError);
  CHECK_THROWS_AS(parse_form_or_system(R"({"arity": 2, "degree": 3, "terms": [{"coeff": "1", "exps": [2, 0]}]})"),
                  InputError);
  CHECK_THROWS_AS(parse_form_or_system(R"({"arity": 2, "terms": [{"coeff": "1x", "exps": [2, 0]}]})"), InputError);
}
