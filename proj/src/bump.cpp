#include "restrictlab/bump.hpp"

#include "restrictlab/gauss_legendre.hpp"

#include <cmath>
#include <stdexcept>

namespace restrictlab::bump {

namespace {

// smootherstep S(s) = 35 s^4 - 84 s^5 + 70 s^6 - 20 s^7
template <class T>
T smootherstep(const T& s) {
  T s2 = s * s;
  T s4 = s2 * s2;
  return s4 * (T(35) - T(84) * s + T(70) * s2 - T(20) * s2 * s);
}

template <class T>
T chi_generic(T u, const T& plateau, const T& support) {
  if (u < 0) u = -u;
  if (u <= plateau) return T(1);
  if (u >= support) return T(0);
  T s = (u - plateau) / (support - plateau);
  return T(1) - smootherstep(s);
}

Rational dyadic(int j) {
  return j >= 0 ? Rational(BigInt(1) << j) : Rational(BigInt(1), BigInt(1) << (-j));
}

}  // namespace

double chi(double u) { return chi_generic(u, kPlateau, kSupport); }

Rational chi(const Rational& u) { return chi_generic(u, Rational(1, 16), Rational(1, 8)); }

double chi_derivative(double u, int k) {
  if (k == 0) return chi(u);
  double a = std::abs(u);
  if (a <= kPlateau || a >= kSupport) return 0.0;
  double sign = u < 0 ? -1.0 : 1.0;
  double s = (a - kPlateau) * 16.0;
  double t = 1 - s;
  switch (k) {
    case 1: return -16.0 * sign * 140.0 * s * s * s * t * t * t;
    case 2: return -256.0 * 420.0 * s * s * t * t * (1 - 2 * s);
    case 3: return -4096.0 * sign * 840.0 * s * t * (1 - 5 * s + 5 * s * s);
    default: throw std::invalid_argument("chi_derivative supports k <= 3");
  }
}

double psi(std::span<const double> xi) {
  double v = 1;
  for (double x : xi) {
    v *= chi(x);
    if (v == 0) break;
  }
  return v;
}

Rational psi(std::span<const Rational> xi) {
  Rational v = 1;
  for (const auto& x : xi) {
    v *= chi(x);
    if (v == 0) break;
  }
  return v;
}

double lp_piece(int j, int j_max, std::span<const double> xi) {
  if (j < 0 || j > j_max) throw std::invalid_argument("lp_piece: index out of range");
  std::vector<double> a(xi.begin(), xi.end()), b(xi.begin(), xi.end());
  for (auto& v : a) v = std::ldexp(v, j);
  double head = psi(a);
  if (j == j_max) return head;
  for (auto& v : b) v = std::ldexp(v, j + 1);
  return head - psi(b);
}

Rational lp_piece(int j, int j_max, std::span<const Rational> xi) {
  if (j < 0 || j > j_max) throw std::invalid_argument("lp_piece: index out of range");
  std::vector<Rational> a(xi.begin(), xi.end()), b(xi.begin(), xi.end());
  for (auto& v : a) v *= dyadic(j);
  Rational head = psi(a);
  if (j == j_max) return head;
  for (auto& v : b) v *= dyadic(j + 1);
  return head - psi(b);
}

double chi_hat(double zeta) {
  const auto& rule = gauss_legendre(64);
  // at most ~4 oscillations per 64-node panel
  const double piece = kPlateau;
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(zeta) * piece / 4.0)));
  double total = 0;
  for (int p = 0; p < 2; ++p) {
    const double a0 = p * piece;
    for (int k = 0; k < panels; ++k) {
      const double a = a0 + piece * k / panels;
      const double b = a0 + piece * (k + 1) / panels;
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      double acc = 0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        double u = mid + half * rule.nodes[i];
        acc += rule.weights[i] * chi(u) * std::cos(2 * M_PI * u * zeta);
      }
      total += acc * half;
    }
  }
  return 2 * total;
}

Rational smooth_cutoff(std::span<const Rational> u) {
  Rational v = 1;
  for (const auto& x : u) {
    v *= chi(x / 16);
    if (v == 0) break;
  }
  return v;
}

double smooth_cutoff(std::span<const double> u) {
  double v = 1;
  for (double x : u) v *= chi(x / 16);
  return v;
}

}  // namespace restrictlab::bump
