#pragma once

#include "restrictlab/numeric.hpp"

#include <span>

namespace restrictlab {

// One-dimensional profile chi: 1 on |u| <= 1/16, 0 on |u| >= 1/8, with the
// degree-7 smootherstep in between (C^3 at both knots, monotone).
// Psi(xi) = prod_i chi(xi_i) is the cube bump used for the major arcs.
namespace bump {

inline constexpr double kPlateau = 1.0 / 16.0;
inline constexpr double kSupport = 1.0 / 8.0;

double chi(double u);
Rational chi(const Rational& u);

// k-th derivative of chi for k in {0, 1, 2, 3}.
double chi_derivative(double u, int k);

double psi(std::span<const double> xi);
Rational psi(std::span<const Rational> xi);

// Littlewood-Paley piece Psi_j = Psi(2^j xi) - Psi(2^{j+1} xi) for j < j_max,
// Psi(2^j xi) at j = j_max.
double lp_piece(int j, int j_max, std::span<const double> xi);
Rational lp_piece(int j, int j_max, std::span<const Rational> xi);

// Fourier transform of chi under e(t) = exp(-2 pi i t):
// hat chi(zeta) = 2 int_0^{1/8} chi(u) cos(2 pi u zeta) du, by composite Gauss-Legendre.
double chi_hat(double zeta);

// Smooth box cutoff with plateau [-1,1]^d and support [-2,2]^d: prod_i chi(u_i / 16).
Rational smooth_cutoff(std::span<const Rational> u);
double smooth_cutoff(std::span<const double> u);

}  // namespace bump
}  // namespace restrictlab
