#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "restrictlab/surface.hpp"

#include <cmath>
#include <numbers>

using namespace restrictlab;

namespace {

constexpr double kPi = std::numbers::pi;

IntegerForm make(std::size_t d, std::vector<std::pair<long, std::vector<unsigned>>> terms) {
  std::vector<MonomialTerm> t;
  for (auto& [c, e] : terms) t.push_back({BigInt(c), e});
  return IntegerForm(d, std::move(t));
}

// Closed form for the unit sphere in R^3 with dsigma = dS / 2.
double sphere3_ft(double rho) { return rho == 0 ? 2 * kPi : 2 * kPi * std::sin(2 * kPi * rho) / (2 * kPi * rho); }

StarQuadrature quad(const IntegerForm& f, std::size_t budget, QuadratureScheme s = QuadratureScheme::product_angles) {
  return build_quadrature(f, positivity_certificate(f), budget, s);
}

}  // namespace

TEST_CASE("sphere rules integrate constants and low moments") {
  for (std::size_t d = 1; d <= 6; ++d) {
    auto r = product_sphere_rule(d, 24);
    double s = 0, m2 = 0;
    double worst = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      s += r.weights[i];
      m2 += r.weights[i] * r.directions[i * d] * r.directions[i * d];
      double norm = 0;
      for (std::size_t c = 0; c < d; ++c) norm += r.directions[i * d + c] * r.directions[i * d + c];
      worst = std::max(worst, std::abs(norm - 1));
    }
    CHECK(worst < 1e-12);
    CHECK(s == doctest::Approx(sphere_area(d)).epsilon(1e-10));
    // int w_1^2 = area / d
    CHECK(m2 == doctest::Approx(sphere_area(d) / static_cast<double>(d)).epsilon(1e-10));
  }
  CHECK(sphere_area(3) == doctest::Approx(4 * kPi));
  auto h = halton_sphere_rule(4, 1000);
  CHECK(h.size() == 1000);
}

TEST_CASE("sigma masses") {
  auto s2 = IntegerForm::diagonal(2, 2), s3 = IntegerForm::diagonal(3, 2);
  CHECK(quad(s2, 1000).mass() == doctest::Approx(kPi).epsilon(1e-10));
  CHECK(quad(s3, 100000).mass() == doctest::Approx(2 * kPi).epsilon(1e-10));
  CHECK(quad(s3, 100000, QuadratureScheme::low_discrepancy).mass() == doctest::Approx(2 * kPi).epsilon(1e-10));

  // non-spherical forms: the two schemes agree
  for (const auto& f : {make(3, {{2, {2, 0, 0}}, {1, {1, 1, 0}}, {3, {0, 2, 0}}, {1, {0, 0, 2}}}),
                        IntegerForm::diagonal(3, 4, {BigInt(1), BigInt(2), BigInt(3)})}) {
    auto cert = positivity_certificate(f);
    if (!cert.usable()) cert = declare_positive_definite(Rational(1, 10));
    const double a = build_quadrature(f, cert, 200000, QuadratureScheme::product_angles).mass();
    const double b = build_quadrature(f, cert, 200000, QuadratureScheme::low_discrepancy).mass();
    CHECK(std::abs(a - b) < 1e-3 * a);
  }
  // ellipse x^2 + 4y^2 = 1: dS/|grad Q| integrates to pi / sqrt(det) = pi / 2
  CHECK(quad(IntegerForm::diagonal(2, 2, {BigInt(1), BigInt(4)}), 4000).mass() == doctest::Approx(kPi / 2).epsilon(1e-9));

  auto hyperbolic = make(2, {{1, {2, 0}}, {-1, {0, 2}}});
  CHECK_THROWS_AS(quad(hyperbolic, 100), InputError);
}

TEST_CASE("sigma Fourier transform of the 3-sphere") {
  auto q = quad(IntegerForm::diagonal(3, 2), 200000);
  std::vector<double> zero{0, 0, 0};
  CHECK(std::abs(sigma_ft(q, zero) - Complex(q.mass())) < 1e-12);
  for (double rho : {0.25, 0.5, 1.3, 3.0}) {
    std::vector<double> xi{rho * 0.6, rho * 0.0, rho * 0.8};
    auto v = sigma_ft(q, xi, 2);
    CHECK(v.real() == doctest::Approx(sphere3_ft(rho)).epsilon(1e-6).scale(1));
    CHECK(std::abs(v.imag()) < 1e-9);
    std::vector<double> neg{-xi[0], -xi[1], -xi[2]};
    auto w = sigma_ft(q, neg);
    CHECK(w == std::conj(v));
  }
}

TEST_CASE("decay reports") {
  auto q3 = quad(IntegerForm::diagonal(3, 2), 200000);
  std::vector<double> zero{0};
  auto r0 = decay_report(q3, Rational(3, 2), zero);
  CHECK(r0.rows[0].ratio == doctest::Approx(q3.mass()));

  std::vector<double> mags{4, 8, 16, 32};
  auto ref3 = quad(IntegerForm::diagonal(3, 2), 200000, QuadratureScheme::low_discrepancy);
  auto r = decay_report(q3, Rational(3, 2), mags, {.directions = 2, .reference = &ref3});
  CHECK(r.slope == doctest::Approx(-1).epsilon(0.1));
  for (const auto& row : r.rows) CHECK(row.error_estimate.has_value());

  // sphere in R^5 decays like |xi|^{-2}; 2 * 36^4 product nodes resolve |xi| < 4.5
  auto q5 = quad(IntegerForm::diagonal(5, 2), 2 * 36 * 36 * 36 * 36);
  std::vector<double> mags5{1, 1.5, 2, 2.5, 3};
  auto r5 = decay_report(q5, Rational(5, 2), mags5, {.directions = 1});
  MESSAGE("d=5 slope " << r5.slope);
  CHECK(r5.slope == doctest::Approx(-2).epsilon(0.1));
}

TEST_CASE("neighborhood products stay bounded") {
  auto s3 = IntegerForm::diagonal(3, 2);
  std::vector<double> ts{0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
  auto rep = neighborhood_check(s3, positivity_certificate(s3), ts);
  for (const auto& row : rep.rows) MESSAGE("t=" << row.t << " product=" << row.product);
  CHECK(rep.max_over_min <= 3);

  // far from the surface the mollified measure vanishes
  std::vector<double> far{3, 0, 0};
  CHECK(mollified_measure(s3, far, 0.25) == 0);
  // heavy smoothing: t * value is small compared to the plateau
  std::vector<double> ts_big{64};
  auto big = neighborhood_check(s3, positivity_certificate(s3), ts_big);
  CHECK(big.rows[0].product < 0.1 * rep.rows[0].product);
}
