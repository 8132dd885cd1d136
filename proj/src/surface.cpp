#include "restrictlab/surface.hpp"

#include "restrictlab/bump.hpp"
#include "restrictlab/compiled_form.hpp"
#include "restrictlab/gauss_legendre.hpp"
#include "restrictlab/parallel.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <numbers>

namespace restrictlab {

namespace {

constexpr double kPi = std::numbers::pi;

const std::vector<unsigned>& first_primes() {
  static const std::vector<unsigned> p{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                                       59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113};
  return p;
}

double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

// Orthonormal basis of the complement of the unit vector u, flat (d - 1 rows of length d).
std::vector<double> complement_basis(std::span<const double> u) {
  const std::size_t d = u.size();
  std::vector<double> basis;
  for (std::size_t c = 0; c < d && basis.size() < (d - 1) * d; ++c) {
    std::vector<double> v(d, 0.0);
    v[c] = 1;
    auto project_out = [&](std::span<const double> w) {
      double dot = 0;
      for (std::size_t i = 0; i < d; ++i) dot += v[i] * w[i];
      for (std::size_t i = 0; i < d; ++i) v[i] -= dot * w[i];
    };
    project_out(u);
    for (std::size_t b = 0; b * d < basis.size(); ++b) project_out(std::span<const double>(basis.data() + b * d, d));
    double norm = 0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-8) continue;
    for (double x : v) basis.push_back(x / norm);
  }
  return basis;
}

}  // namespace

double sphere_area(std::size_t d) {
  const double h = static_cast<double>(d) / 2;
  return 2 * std::pow(kPi, h) / std::tgamma(h);
}

SphereRule product_sphere_rule(std::size_t dim, std::size_t n) {
  if (dim == 0 || n == 0) throw InputError("sphere rule needs dim >= 1 and n >= 1");
  SphereRule rule;
  rule.dim = dim;
  if (dim == 1) {
    rule.directions = {-1.0, 1.0};
    rule.weights = {1.0, 1.0};
    return rule;
  }
  if (dim == 2) {
    const std::size_t m = 2 * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double phi = 2 * kPi * (static_cast<double>(i) + 0.5) / static_cast<double>(m);
      rule.directions.push_back(std::cos(phi));
      rule.directions.push_back(std::sin(phi));
      rule.weights.push_back(2 * kPi / static_cast<double>(m));
    }
    return rule;
  }
  // w = (cos theta, sin theta * v), v on S^{dim-2}, dw = sin^{dim-2} theta dtheta dv
  const SphereRule inner = product_sphere_rule(dim - 1, n);
  const auto& gl = gauss_legendre(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = kPi / 2 * (gl.nodes[i] + 1);
    const double w = kPi / 2 * gl.weights[i] * std::pow(std::sin(theta), static_cast<double>(dim - 2));
    for (std::size_t j = 0; j < inner.size(); ++j) {
      rule.directions.push_back(std::cos(theta));
      for (std::size_t c = 0; c < dim - 1; ++c)
        rule.directions.push_back(std::sin(theta) * inner.directions[j * (dim - 1) + c]);
      rule.weights.push_back(w * inner.weights[j]);
    }
  }
  return rule;
}

SphereRule halton_sphere_rule(std::size_t dim, std::size_t count) {
  if (dim == 0 || dim > first_primes().size()) throw InputError("Halton rule supports 1 <= d <= 30");
  if (count == 0) throw InputError("Halton rule needs at least one point");
  const boost::math::normal_distribution<double> normal;
  SphereRule rule;
  rule.dim = dim;
  std::vector<double> g(dim);
  for (std::uint64_t i = 1; rule.size() < count; ++i) {
    double norm = 0;
    for (std::size_t c = 0; c < dim; ++c) {
      g[c] = boost::math::quantile(normal, radical_inverse(i, first_primes()[c]));
      norm += g[c] * g[c];
    }
    norm = std::sqrt(norm);
    if (norm == 0) continue;
    for (double x : g) rule.directions.push_back(x / norm);
    rule.weights.push_back(0);
  }
  const double w = sphere_area(dim) / static_cast<double>(count);
  for (auto& x : rule.weights) x = w;
  return rule;
}

double StarQuadrature::mass() const {
  std::vector<Complex> terms(mass_weights.begin(), mass_weights.end());
  return pairwise_sum(terms).real();
}

StarQuadrature build_quadrature(const IntegerForm& form, const PositivityCertificate& certificate,
                                std::size_t node_budget, QuadratureScheme scheme) {
  if (!certificate.usable()) throw InputError("surface quadrature needs a positive-definite form");
  const std::size_t d = form.arity();
  const unsigned k = form.degree();
  StarQuadrature quad;
  quad.dim = d;
  quad.degree = k;
  quad.scheme = scheme;
  if (scheme == QuadratureScheme::product_angles) {
    if (d > 6) throw InputError("product-angle quadrature is limited to d <= 6; use the low-discrepancy scheme");
    // n^{d-2} * 2n nodes
    std::size_t n = 1;
    if (d >= 2) {
      const double dd = static_cast<double>(d) - 1;
      n = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::pow(node_budget / 2.0, 1.0 / dd) + 1e-9)));
    }
    quad.sphere = product_sphere_rule(d, n);
  } else {
    quad.sphere = halton_sphere_rule(d, std::max<std::size_t>(node_budget, 1));
  }
  RealForm q(form);
  const std::size_t nodes = quad.sphere.size();
  quad.nodes.resize(nodes * d);
  quad.densities.resize(nodes);
  quad.mass_weights.resize(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    std::span<const double> w(quad.sphere.directions.data() + i * d, d);
    const double qw = q(w);
    if (!(qw > 0)) throw InputError("form is not positive on the unit sphere");
    const double r = std::pow(qw, -1.0 / k);
    for (std::size_t c = 0; c < d; ++c) quad.nodes[i * d + c] = r * w[c];
    quad.densities[i] = std::pow(qw, -static_cast<double>(d) / k) / k;
    quad.mass_weights[i] = quad.sphere.weights[i] * quad.densities[i];
  }
  return quad;
}

Complex sigma_ft(const StarQuadrature& quad, std::span<const double> xi, std::size_t threads) {
  if (xi.size() != quad.dim) throw InputError("frequency has wrong dimension");
  const std::size_t d = quad.dim;
  std::vector<Complex> terms(quad.size());
  parallel_chunks(threads, quad.size(), [&](std::size_t, std::size_t b, std::size_t e_) {
    for (std::size_t i = b; i < e_; ++i) {
      double phase = 0;
      for (std::size_t c = 0; c < d; ++c) phase += quad.nodes[i * d + c] * xi[c];
      terms[i] = quad.mass_weights[i] * e(phase);
    }
  });
  return pairwise_sum(terms);
}

std::vector<std::vector<double>> probe_directions(std::size_t dim, std::size_t count) {
  std::vector<std::vector<double>> out;
  if (count == 0) return out;
  std::vector<double> e1(dim, 0.0);
  e1[0] = 1;
  out.push_back(e1);
  if (count > 1 && dim > 1) out.emplace_back(dim, 1 / std::sqrt(static_cast<double>(dim)));
  if (out.size() < count) {
    auto h = halton_sphere_rule(dim, count - out.size());
    for (std::size_t i = 0; i < h.size(); ++i)
      out.emplace_back(h.directions.begin() + static_cast<long>(i * dim),
                       h.directions.begin() + static_cast<long>((i + 1) * dim));
  }
  return out;
}

DecayReport decay_report(const StarQuadrature& quad, const Rational& kappa, std::span<const double> magnitudes,
                         const DecayOptions& options) {
  const std::size_t d = quad.dim;
  const auto dirs = probe_directions(d, options.directions);
  const double kap = to_double(kappa);
  const std::size_t window = std::max<std::size_t>(1, options.window_samples);
  DecayReport report;
  std::vector<double> lx, ly;
  std::vector<double> xi(d);
  for (double r : magnitudes) {
    DecayRow row{r, 0, std::pow(1 + r, 1 - kap), 0, std::nullopt, false};
    double err = 0;
    for (std::size_t w = 0; w < window; ++w) {
      const double rho = r + static_cast<double>(w) / static_cast<double>(window);
      for (const auto& u : dirs) {
        for (std::size_t c = 0; c < d; ++c) xi[c] = rho * u[c];
        const Complex v = sigma_ft(quad, xi, options.threads);
        row.sup_abs = std::max(row.sup_abs, std::abs(v));
        if (options.reference) err = std::max(err, std::abs(v - sigma_ft(*options.reference, xi, options.threads)));
      }
    }
    row.ratio = row.sup_abs / row.envelope;
    if (options.reference) {
      row.error_estimate = err;
      row.quadrature_dominated = err > 0.1 * row.sup_abs;
      report.warning = report.warning || row.quadrature_dominated;
    }
    if (r > 0 && row.sup_abs > 0) {
      lx.push_back(std::log(r));
      ly.push_back(std::log(row.sup_abs));
    }
    report.rows.push_back(row);
  }
  report.slope = fitted_slope(lx, ly);
  return report;
}

double mollified_measure(const IntegerForm& form, std::span<const double> x, double t,
                         const NeighborhoodOptions& options) {
  const std::size_t d = form.arity();
  if (x.size() != d) throw InputError("probe has wrong dimension");
  if (!(t > 0)) throw InputError("mollifier scale must be positive");
  RealForm q(form);
  const unsigned k = form.degree();
  const double td = std::pow(t, static_cast<double>(d));
  std::vector<double> y(d), z(d);
  auto contribution = [&](std::span<const double> w) {
    const double qw = q(w);
    const double r = std::pow(qw, -1.0 / k);
    for (std::size_t c = 0; c < d; ++c) z[c] = (x[c] - r * w[c]) / t;
    const double phi = bump::psi(z);
    return phi == 0 ? 0.0 : phi / td * std::pow(qw, -static_cast<double>(d) / k) / k;
  };
  double norm = 0;
  for (double v : x) norm += v * v;
  norm = std::sqrt(norm);
  const double reach = std::sqrt(static_cast<double>(d)) * t * bump::kSupport;
  if (d == 1 || norm == 0 || reach >= norm) {
    // cap covers everything that can matter: fall back to a global rule
    auto rule = product_sphere_rule(d, std::max<std::size_t>(options.panels * options.panel_nodes, 2));
    double s = 0;
    for (std::size_t i = 0; i < rule.size(); ++i)
      s += rule.weights[i] * contribution(std::span<const double>(rule.directions.data() + i * d, d));
    return s;
  }
  std::vector<double> u(d);
  for (std::size_t c = 0; c < d; ++c) u[c] = x[c] / norm;
  // the ray through w misses the support unless the angle to x is at most asin(reach / |x|)
  const double alpha = std::asin(reach / norm);
  const auto basis = complement_basis(u);
  const SphereRule transverse = product_sphere_rule(d - 1, options.sphere_nodes);
  const auto& gl = gauss_legendre(options.panel_nodes);
  std::vector<double> w(d), v(d);
  double total = 0;
  for (std::size_t p = 0; p < options.panels; ++p) {
    const double a = alpha * static_cast<double>(p) / static_cast<double>(options.panels);
    const double b = alpha * static_cast<double>(p + 1) / static_cast<double>(options.panels);
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double theta = (a + b) / 2 + (b - a) / 2 * gl.nodes[i];
      const double wt = (b - a) / 2 * gl.weights[i] * std::pow(std::sin(theta), static_cast<double>(d - 2));
      double inner = 0;
      for (std::size_t j = 0; j < transverse.size(); ++j) {
        std::fill(v.begin(), v.end(), 0.0);
        for (std::size_t c = 0; c + 1 < d; ++c)
          for (std::size_t m = 0; m < d; ++m) v[m] += transverse.directions[j * (d - 1) + c] * basis[c * d + m];
        for (std::size_t m = 0; m < d; ++m) w[m] = std::cos(theta) * u[m] + std::sin(theta) * v[m];
        inner += transverse.weights[j] * contribution(w);
      }
      total += wt * inner;
    }
  }
  return total;
}

NeighborhoodReport neighborhood_check(const IntegerForm& form, const PositivityCertificate& certificate,
                                      std::span<const double> ts, const NeighborhoodOptions& options) {
  if (!certificate.usable()) throw InputError("neighborhood check needs a positive-definite form");
  const std::size_t d = form.arity();
  RealForm q(form);
  const auto dirs = probe_directions(d, options.directions);
  NeighborhoodReport report;
  double lo = 0, hi = 0;
  std::vector<double> x(d);
  for (double t : ts) {
    NeighborhoodRow row{t, 0, {}};
    for (const auto& u : dirs) {
      const double r = std::pow(q(u), -1.0 / form.degree());
      for (double eta : options.offsets) {
        for (std::size_t c = 0; c < d; ++c) x[c] = (r + eta * t) * u[c];
        const double v = t * mollified_measure(form, x, t, options);
        if (v > row.product || row.argmax.empty()) {
          row.product = v;
          row.argmax = x;
        }
      }
    }
    lo = report.rows.empty() ? row.product : std::min(lo, row.product);
    hi = std::max(hi, row.product);
    report.rows.push_back(std::move(row));
  }
  report.max_over_min = lo > 0 ? hi / lo : std::nan("");
  return report;
}

std::string to_string(QuadratureScheme s) {
  return s == QuadratureScheme::product_angles ? "product-angles" : "low-discrepancy";
}

}  // namespace restrictlab
