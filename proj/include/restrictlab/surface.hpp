#pragma once

#include "restrictlab/expsums.hpp"
#include "restrictlab/forms.hpp"

#include <optional>
#include <span>
#include <vector>

namespace restrictlab {

// Area of the unit sphere S^{d-1}.
double sphere_area(std::size_t d);

// Quadrature on S^{dim-1}: flat directions (dim per node) and weights.
struct SphereRule {
  std::size_t dim = 0;
  std::vector<double> directions;
  std::vector<double> weights;
  std::size_t size() const { return weights.size(); }
};

// Product rule: Gauss-Legendre in each polar angle (with its sine weight), trapezoid in the azimuth.
// n polar nodes per angle and 2n azimuthal nodes.
SphereRule product_sphere_rule(std::size_t dim, std::size_t n);
// Halton points mapped through the normal quantile and normalized; equal weights.
SphereRule halton_sphere_rule(std::size_t dim, std::size_t count);

enum class QuadratureScheme { product_angles, low_discrepancy };

// Gelfand-Leray measure on {Q = 1} through the radial parametrization
//   int f dsigma = (1/k) int_{S^{d-1}} f(Q(w)^{-1/k} w) Q(w)^{-d/k} dw.
struct StarQuadrature {
  std::size_t dim = 0;
  unsigned degree = 0;
  QuadratureScheme scheme = QuadratureScheme::product_angles;
  SphereRule sphere;
  std::vector<double> nodes;         // x(w) = Q(w)^{-1/k} w, flat
  std::vector<double> densities;     // Q(w)^{-d/k} / k
  std::vector<double> mass_weights;  // sphere weight * density
  std::size_t size() const { return mass_weights.size(); }
  double mass() const;
};

StarQuadrature build_quadrature(const IntegerForm& form, const PositivityCertificate& certificate,
                                std::size_t node_budget, QuadratureScheme scheme);

// hat sigma(xi) = int e(x . xi) dsigma(x).
Complex sigma_ft(const StarQuadrature& quad, std::span<const double> xi, std::size_t threads = 1);

struct DecayRow {
  double magnitude;
  double sup_abs;                        // sup over directions and the window [r, r + 1)
  double envelope;                       // (1 + r)^{1 - kappa}
  double ratio;                          // sup_abs / envelope
  std::optional<double> error_estimate;  // scheme disagreement when a reference is given
  bool quadrature_dominated = false;
};

struct DecayReport {
  std::vector<DecayRow> rows;
  double slope = 0;  // log sup vs log r, rows with r > 0
  bool warning = false;
};

struct DecayOptions {
  std::size_t directions = 4;
  std::size_t window_samples = 8;
  const StarQuadrature* reference = nullptr;
  std::size_t threads = 1;
};

DecayReport decay_report(const StarQuadrature& quad, const Rational& kappa, std::span<const double> magnitudes,
                         const DecayOptions& options = {});

// Fixed direction sample: e_1, the diagonal, then Halton directions.
std::vector<std::vector<double>> probe_directions(std::size_t dim, std::size_t count);

struct NeighborhoodRow {
  double t;
  double product;  // t * sup over probes of (phi_t * dsigma)
  std::vector<double> argmax;
};

struct NeighborhoodReport {
  std::vector<NeighborhoodRow> rows;
  double max_over_min = 0;
};

struct NeighborhoodOptions {
  std::size_t directions = 3;
  std::vector<double> offsets{-1.0 / 16, -1.0 / 32, 0.0, 1.0 / 32, 1.0 / 16};  // radial offsets in units of t
  std::size_t panels = 16;                                                      // polar panels of the cap
  std::size_t panel_nodes = 12;
  std::size_t sphere_nodes = 24;  // per angle on the transverse sphere
};

// (phi_t * dsigma)(x) with phi_t(y) = t^{-d} Psi(y / t), by a cap quadrature around x.
double mollified_measure(const IntegerForm& form, std::span<const double> x, double t,
                         const NeighborhoodOptions& options = {});

NeighborhoodReport neighborhood_check(const IntegerForm& form, const PositivityCertificate& certificate,
                                      std::span<const double> ts, const NeighborhoodOptions& options = {});

std::string to_string(QuadratureScheme s);

}  // namespace restrictlab
