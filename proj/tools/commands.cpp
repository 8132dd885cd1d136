#include "commands.hpp"

#include "restrictlab/container.hpp"
#include "restrictlab/expsums.hpp"
#include "restrictlab/extension.hpp"
#include "restrictlab/form_io.hpp"
#include "restrictlab/forms.hpp"
#include "restrictlab/lattice.hpp"
#include "restrictlab/magyar.hpp"
#include "restrictlab/surface.hpp"

#include <cmath>
#include <memory>
#include <random>

namespace rlcli {

using namespace restrictlab;

namespace {

std::string source_name(ValueSource s) {
  switch (s) {
    case ValueSource::computed: return "computed";
    case ValueSource::user_declared: return "declared";
    case ValueSource::unknown: return "unknown";
  }
  return "unknown";
}

std::string opt_rational(const std::optional<Rational>& r) { return r ? num(*r) : "NA"; }

PositivityCertificate certificate_for(const IntegerForm& form, const std::string& m_low) {
  auto cert = positivity_certificate(form);
  if (cert.usable()) return cert;
  if (m_low.empty())
    throw InputError("positivity of the form is not certified; pass --m-low with a lower bound for Q on the unit sphere");
  return declare_positive_definite(parse_rational(m_low));
}

Rational kappa_for(const IntegerForm& form, const std::string& override_text) {
  if (!override_text.empty()) return parse_rational(override_text);
  auto rep = parameter_report(form);
  return rep.hypersurface->kappa;
}

std::int64_t single(const std::string& text, const char* what) {
  auto v = parse_int_list(text);
  if (v.size() != 1) throw InputError(std::string(what) + " takes a single value");
  return v.front();
}

std::size_t default_nodes(std::size_t d) {
  if (d < 2) return 256;
  return std::max<std::size_t>(256, 2 * static_cast<std::size_t>(std::pow(16.0, static_cast<double>(d - 1))));
}

QuadratureScheme scheme_from(const std::string& s) {
  if (s == "product") return QuadratureScheme::product_angles;
  if (s == "halton") return QuadratureScheme::low_discrepancy;
  throw InputError("unknown quadrature scheme '" + s + "' (product, halton)");
}

std::vector<std::string> coordinate_names(const char* prefix, std::size_t d) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= d; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// 0, (j/32) e_1 for j = 1..15, and 8 seeded uniform points in [-1/2, 1/2)^d.
std::vector<std::vector<double>> minor_arc_sample(std::size_t d, std::uint64_t seed) {
  std::vector<std::vector<double>> xs;
  xs.emplace_back(d, 0.0);
  for (int j = 1; j <= 15; ++j) {
    std::vector<double> x(d, 0.0);
    x[0] = j / 32.0;
    xs.push_back(x);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int i = 0; i < 8; ++i) {
    std::vector<double> x(d);
    for (auto& c : x) c = u(rng);
    xs.push_back(x);
  }
  return xs;
}

struct Opts {
  std::string form, system, m_low;
  std::string lambda, N, q, a, m, j, p, magnitudes, ts, s_list, sizes;
  std::string kappa, gamma, scheme = "product", truncation = "ceiling", cutoff = "indicator", weights = "uniform";
  std::optional<long> singular_dim;
  std::vector<std::string> ranks;
  std::int64_t q_max = 0;
  std::size_t nodes = 0, reference_nodes = 0, directions = 4, grid = 256, random_draws = 2;
  int j_max = 4;
  unsigned l = 1, order = 0;
  double radius = 2.0, tolerance = 0.01;
  bool odd_only = false, rlab = false, dump = false, no_uniform = false;
};

// Exactly one of --form / --system, with its scale option.
void require_input(const Opts& o, bool scales = true) {
  if (o.form.empty() == o.system.empty()) throw InputError("pass exactly one of --form and --system");
  if (!scales) return;
  if (!o.form.empty() && o.lambda.empty()) throw InputError("--lambda is required with --form");
  if (!o.system.empty() && o.N.empty()) throw InputError("--N is required with --system");
}

// ---- commands ----

void run_params(Context& ctx, const Opts& o) {
  require_input(o, false);
  Table t({"quantity", "value"});
  ParamReport rep;
  if (!o.form.empty()) {
    rep = parameter_report(load_form(o.form), o.singular_dim);
  } else {
    std::map<unsigned, long> declared;
    for (const auto& r : o.ranks) {
      auto eq = r.find('=');
      if (eq == std::string::npos) throw InputError("--rank expects degree=value");
      declared[static_cast<unsigned>(single(r.substr(0, eq), "--rank degree"))] = single(r.substr(eq + 1), "--rank value");
    }
    rep = parameter_report(load_system(o.system), declared, ctx.seed);
  }
  t.add({"arity", num(static_cast<std::uint64_t>(rep.arity))});
  t.add({"degree", num(static_cast<std::uint64_t>(rep.degree))});
  if (rep.hypersurface) {
    const auto& h = *rep.hypersurface;
    t.add({"singular_dimension", num(static_cast<std::int64_t>(h.singular_dimension))});
    t.add({"singular_dimension_source", source_name(h.singular_dimension_source)});
    t.add({"kappa", num(h.kappa)});
    t.add({"gamma", num(h.gamma)});
    t.add({"birch_criterion", flag(h.birch_criterion_holds)});
    t.add({"p_critical", opt_rational(h.p_critical)});
    t.add({"threshold_main", opt_rational(h.threshold_main)});
    t.add({"threshold_major_arcs", opt_rational(h.threshold_major_arcs)});
    ctx.summary["kappa"] = num(h.kappa);
    ctx.summary["gamma"] = num(h.gamma);
  }
  t.add({"R", num(static_cast<std::uint64_t>(rep.total_nonlinear))});
  t.add({"D", num(static_cast<std::uint64_t>(rep.total_degree))});
  t.add({"r_Q", num(static_cast<std::uint64_t>(rep.max_block))});
  const auto s_values = o.s_list.empty() ? std::vector<std::int64_t>{1, 2, 3, 4} : parse_int_list(o.s_list);
  for (const auto& b : rep.blocks) {
    const std::string k = "block" + std::to_string(b.degree) + ".";
    t.add({k + "count", num(static_cast<std::uint64_t>(b.count))});
    t.add({k + "chi", num(b.chi)});
    std::string rank = b.unconstrained() ? "unconstrained" : b.birch_rank ? std::to_string(*b.birch_rank) : "NA";
    t.add({k + "birch_rank", rank});
    t.add({k + "birch_rank_source", b.unconstrained() ? "NA" : source_name(b.birch_rank_source)});
    t.add({k + "rank_at_least_one_certified", flag(b.rank_at_least_one_certified)});
  }
  for (auto s : s_values) {
    if (s < 1) throw InputError("s must be >= 1");
    const auto ok = rep.birch_even_ok(static_cast<std::size_t>(s));
    const std::string k = "s" + std::to_string(s) + ".";
    for (std::size_t i = 0; i < rep.blocks.size(); ++i) {
      const auto& b = rep.blocks[i];
      if (b.unconstrained()) continue;
      t.add({k + "block" + std::to_string(b.degree) + ".birch_bound", num(rep.birch_even_bound(b, static_cast<std::size_t>(s)))});
      t.add({k + "block" + std::to_string(b.degree) + ".birch_ok", ok[i] ? flag(*ok[i]) : "NA"});
    }
    t.add({k + "moment_threshold", num(static_cast<std::uint64_t>(rep.moment_exponent_threshold(static_cast<std::size_t>(s))))});
  }
  emit(ctx, "params.csv", t);
}

void run_enumerate(Context& ctx, const Opts& o) {
  auto form = load_form(o.form);
  auto cert = certificate_for(form, o.m_low);
  auto set = enumerate_level_set(form, cert, single(o.lambda, "--lambda"), {ctx.settings.threads});
  Table t(coordinate_names("x", form.arity()));
  for (std::size_t i = 0; i < set.size(); ++i) {
    std::vector<std::string> row;
    for (auto c : set.point(i)) row.push_back(num(c));
    t.add(std::move(row));
  }
  emit(ctx, "enumerate.csv", t);
  ctx.summary["count"] = set.size();
  if (o.rlab) {
    write_rlab_file((ctx.settings.out / "points.rlab").string(), to_rows(set));
    ctx.outputs.push_back("points.rlab");
  }
}

void run_count(Context& ctx, const Opts& o) {
  auto form = load_form(o.form);
  auto cert = certificate_for(form, o.m_low);
  Table t({"lambda", "count", "normalized"});
  for (auto lambda : parse_int_list(o.lambda)) {
    auto s = count_series(form, cert, lambda, lambda, {ctx.settings.threads});
    const auto& e = s.entries.front();
    t.add({num(e.lambda), num(e.count), num(e.normalized)});
  }
  emit(ctx, "count.csv", t);
}

void run_gauss(Context& ctx, const Opts& o) {
  auto form = load_form(o.form);
  const auto q = single(o.q, "--q");
  std::vector<FractionAQ> fractions;
  if (o.a.empty()) {
    fractions = unit_fractions(q);
  } else {
    for (auto a : parse_int_list(o.a)) fractions.emplace_back(a, q);
  }
  std::vector<std::int64_t> m(form.arity(), 0);
  if (!o.m.empty()) {
    m = parse_int_list(o.m);
    if (m.size() != form.arity()) throw InputError("--m needs one entry per variable");
  }
  auto header = std::vector<std::string>{"a", "q"};
  for (auto& n : coordinate_names("m", form.arity())) header.push_back(n);
  for (const char* c : {"re", "im", "abs"}) header.push_back(c);
  Table t(header);
  for (const auto& f : fractions) {
    const Complex g = gauss_sum(form, f, m);
    std::vector<std::string> row{num(f.a), num(f.q)};
    for (auto v : m) row.push_back(num(v));
    row.push_back(num(g.real()));
    row.push_back(num(g.imag()));
    row.push_back(num(std::abs(g)));
    t.add(std::move(row));
  }
  emit(ctx, "gauss.csv", t);
}

void run_weyl(Context& ctx, const Opts& o) {
  auto form = load_form(o.form);
  if (o.q_max < 1) throw InputError("--q-max must be >= 1");
  const Rational kappa = kappa_for(form, o.kappa);
  auto rep = weyl_decay_report(form, o.q_max, kappa, {o.odd_only, ctx.budget});
  Table t({"q", "sup_abs", "a", "margin"});
  for (const auto& r : rep.rows) t.add({num(r.q), num(r.sup_abs), num(r.a_at), num(r.margin)});
  emit(ctx, "weyl-report.csv", t);
  ctx.summary["slope"] = num(rep.slope);
  ctx.summary["kappa"] = num(kappa);
}

void run_surface(Context& ctx, const Opts& o) {
  auto form = load_form(o.form);
  auto cert = certificate_for(form, o.m_low);
  const auto scheme = scheme_from(o.scheme);
  const std::size_t nodes = o.nodes ? o.nodes : default_nodes(form.arity());
  auto quad = build_quadrature(form, cert, nodes, scheme);
  std::optional<StarQuadrature> reference;
  if (o.reference_nodes) reference = build_quadrature(form, cert, o.reference_nodes, scheme);
  const auto magnitudes = o.magnitudes.empty() ? std::vector<double>{0.5, 1, 1.5, 2, 2.5, 3} : parse_double_list(o.magnitudes);
  DecayOptions options;
  options.directions = o.directions;
  options.reference = reference ? &*reference : nullptr;
  options.threads = ctx.settings.threads;
  auto rep = decay_report(quad, kappa_for(form, o.kappa), magnitudes, options);
  Table t({"magnitude", "sup_abs", "envelope", "ratio", "error_estimate", "quadrature_dominated"});
  for (const auto& r : rep.rows)
    t.add({num(r.magnitude), num(r.sup_abs), num(r.envelope), num(r.ratio), num(r.error_estimate), flag(r.quadrature_dominated)});
  emit(ctx, "surface.csv", t);
  ctx.summary["mass"] = num(quad.mass());
  ctx.summary["nodes"] = quad.size();
  ctx.summary["scheme"] = to_string(scheme);
  ctx.summary["slope"] = num(rep.slope);
  if (rep.warning) ctx.warn("quadrature error dominates at least one decay row");
  if (!o.ts.empty()) {
    auto ts = parse_double_list(o.ts);
    auto nb = neighborhood_check(form, cert, ts);
    Table n({"t", "product"});
    for (const auto& r : nb.rows) n.add({num(r.t), num(r.product)});
    emit(ctx, "neighborhood.csv", n);
    ctx.summary["neighborhood_max_over_min"] = num(nb.max_over_min);
  }
}

void run_magyar(Context& ctx, const Opts& o) {
  auto form = load_form(o.form);
  auto cert = certificate_for(form, o.m_low);
  const auto scheme = scheme_from(o.scheme);
  Truncation rule;
  if (o.truncation == "ceiling") rule = Truncation::ceiling;
  else if (o.truncation == "floor") rule = Truncation::floor;
  else throw InputError("unknown truncation '" + o.truncation + "' (ceiling, floor)");
  const std::size_t nodes = o.nodes ? o.nodes : default_nodes(form.arity());
  MagyarDecomposition decomp(form, build_quadrature(form, cert, nodes, scheme), rule, ctx.settings.threads);
  std::optional<MagyarDecomposition> reference;
  if (o.reference_nodes)
    reference.emplace(form, build_quadrature(form, cert, o.reference_nodes, scheme), rule, ctx.settings.threads);
  Rational gamma = o.gamma.empty() ? parameter_report(form).hypersurface->gamma : parse_rational(o.gamma);
  const auto lambdas = parse_int_list(o.lambda.empty() ? "20..200:20" : o.lambda);
  const auto xis = minor_arc_sample(form.arity(), ctx.seed);
  MinorArcOptions options{reference ? &*reference : nullptr, ctx.settings.threads};
  auto rep = minor_arc_report(decomp, cert, lambdas, xis, gamma, options);
  Table t({"lambda", "sup_error", "argmax", "scaled_count", "decay_reference", "quadrature_error", "quadrature_dominated"});
  for (const auto& r : rep.rows)
    t.add({num(r.lambda), num(r.sup_error), num(static_cast<std::uint64_t>(r.argmax)), num(r.scaled_count),
           num(r.decay_reference), num(r.quadrature_error), flag(r.quadrature_dominated)});
  emit(ctx, "magyar-error.csv", t);
  Table x(coordinate_names("xi", form.arity()));
  for (const auto& v : xis) {
    std::vector<std::string> row;
    for (double c : v) row.push_back(num(c));
    x.add(std::move(row));
  }
  emit(ctx, "magyar-xi.csv", x);
  ctx.summary["slope"] = num(rep.slope);
  ctx.summary["spearman"] = num(rep.spearman);
  ctx.summary["gamma"] = num(gamma);
  ctx.summary["truncation"] = to_string(rule);
  if (rep.warning) ctx.warn("quadrature error dominates at least one minor-arc row");
}

void run_kernel(Context& ctx, const Opts& o) {
  auto form = load_form(o.form);
  auto cert = certificate_for(form, o.m_low);
  const std::size_t nodes = o.nodes ? o.nodes : default_nodes(form.arity());
  MagyarDecomposition decomp(form, build_quadrature(form, cert, nodes, scheme_from(o.scheme)), Truncation::ceiling,
                             ctx.settings.threads);
  KernelCheckOptions options{o.j_max, o.grid, o.radius};
  Table t({"lambda", "a", "q", "j", "max_discrepancy", "aliasing_estimate", "error_estimate", "max_kernel",
           "max_phase_error", "points", "within_estimate"});
  std::size_t failures = 0;
  for (auto lambda : parse_int_list(o.lambda))
    for (auto q : parse_int_list(o.q.empty() ? "1,2,3" : o.q))
      for (const auto& f : unit_fractions(q))
        for (auto j : parse_int_list(o.j.empty() ? "0,1" : o.j)) {
          auto c = kernel_identity_check(decomp, lambda, f, static_cast<int>(j), options);
          t.add({num(lambda), num(f.a), num(f.q), num(j), num(c.max_discrepancy), num(c.aliasing_estimate),
                 num(c.error_estimate), num(c.max_kernel), num(c.max_phase_error),
                 num(static_cast<std::uint64_t>(c.points)), flag(c.within_estimate())});
          failures += !c.within_estimate();
        }
  emit(ctx, "kernel-check.csv", t);
  ctx.summary["outside_estimate"] = failures;
  if (failures) ctx.warn(std::to_string(failures) + " kernel checks exceed their error estimate");
}

WeightFunction weights_for(const Opts& o, std::size_t dim, const std::vector<std::int64_t>& support,
                           std::int64_t box, std::uint64_t seed) {
  if (o.weights == "uniform") return WeightFunction::indicator_box(box);
  if (o.weights == "smooth") return WeightFunction::smooth_cutoff(std::max<std::int64_t>(box, 1));
  if (o.weights == "random") return random_phase_weights(dim, support, seed);
  throw InputError("unknown weights '" + o.weights + "' (uniform, smooth, random)");
}

std::vector<std::int64_t> box_points(std::size_t d, std::int64_t N) {
  std::vector<std::int64_t> out, n(d, -N);
  while (true) {
    out.insert(out.end(), n.begin(), n.end());
    std::size_t c = d;
    while (c > 0 && n[c - 1] == N) n[--c] = -N;
    if (c == 0) break;
    ++n[c - 1];
  }
  return out;
}

void run_extension(Context& ctx, const Opts& o) {
  require_input(o);
  const auto ps = parse_double_list(o.p.empty() ? "2,4,inf" : o.p);
  unsigned order = o.order;
  if (!order)
    for (double p : ps) order = std::max(order, std::isinf(p) ? 2u : static_cast<unsigned>(std::ceil(p / 2)));
  GridOptions options{ctx.budget, ctx.fft_threads(), std::max(order, 1u)};
  std::vector<std::size_t> sizes;
  if (!o.sizes.empty())
    for (auto s : parse_int_list(o.sizes)) {
      if (s < 1) throw InputError("--sizes entries must be positive");
      sizes.push_back(static_cast<std::size_t>(s));
    }
  TorusGridFunction grid;
  double l2 = 0;
  if (!o.form.empty()) {
    auto form = load_form(o.form);
    auto set = enumerate_level_set(form, certificate_for(form, o.m_low), single(o.lambda, "--lambda"),
                                   {ctx.settings.threads});
    if (set.empty()) throw InputError("the level set is empty");
    auto w = weights_for(o, form.arity(), set.flat(), set.coordinate_bound(), ctx.seed);
    grid = grid_eval_hypersurface(set, w, sizes, options);
    l2 = l2_norm_squared(set, w);
  } else {
    auto system = load_system(o.system);
    const auto N = single(o.N, "--N");
    if (N < 0) throw InputError("--N must be >= 0");
    auto w = weights_for(o, system.arity(), o.weights == "random" ? box_points(system.arity(), N) : std::vector<std::int64_t>{},
                         N, ctx.seed);
    grid = grid_eval_graph(system, w, sizes, options);
    l2 = l2_norm_squared(system, w);
  }
  if (grid.aliased) ctx.warn("grid sizes alias the trigonometric polynomial");
  Table t({"p", "norm", "power_mean", "error_estimate", "exact", "l2_weights"});
  for (double p : ps) {
    auto n = lp_norm(grid, p);
    t.add({exponent(p), num(n.value), num(n.power_mean), num(n.error_estimate), flag(n.exact), num(std::sqrt(l2))});
  }
  emit(ctx, "extension-norm.csv", t);
  std::vector<std::int64_t> sz(grid.sizes.begin(), grid.sizes.end());
  ctx.summary["sizes"] = sz;
  ctx.summary["spans"] = grid.spans;
  ctx.summary["frequency_bounds"] = grid.frequency_bounds;
  ctx.summary["aliased"] = grid.aliased;
  if (o.dump) {
    ComplexGrid g;
    g.sizes.assign(grid.sizes.begin(), grid.sizes.end());
    g.values = grid.values;
    write_rlab_file((ctx.settings.out / "grid.rlab").string(), g);
    ctx.outputs.push_back("grid.rlab");
  }
}

void run_moments(Context& ctx, const Opts& o) {
  require_input(o);
  if (o.l < 1) throw InputError("--l must be >= 1");
  BoxCountOptions box{ctx.budget, ctx.settings.threads};
  if (!o.form.empty()) {
    auto form = load_form(o.form);
    auto cert = certificate_for(form, o.m_low);
    Table t({"lambda", "l", "sum_of_squares", "sup", "support", "points"});
    for (auto lambda : parse_int_list(o.lambda)) {
      auto set = enumerate_level_set(form, cert, lambda, {ctx.settings.threads});
      auto h = ValueHistogram::from_unsorted(form.arity(), set.flat(), std::vector<std::uint64_t>(set.size(), 1));
      if (h.empty()) {
        t.add({num(lambda), num(static_cast<std::uint64_t>(o.l)), "0", "0", "0", "0"});
        continue;
      }
      auto m = moment_from_histogram(h, o.l, {ctx.budget, ctx.settings.threads});
      t.add({num(lambda), num(static_cast<std::uint64_t>(o.l)), num(m.sum_of_squares), num(m.sup),
             num(static_cast<std::uint64_t>(m.support)), num(m.box_points)});
    }
    emit(ctx, "moments.csv", t);
    return;
  }
  auto system = load_system(o.system);
  CutoffKind cutoff;
  if (o.cutoff == "indicator") cutoff = CutoffKind::indicator;
  else if (o.cutoff == "smooth") cutoff = CutoffKind::smooth;
  else throw InputError("unknown cutoff '" + o.cutoff + "' (indicator, smooth)");
  Table t({"N", "l", "cutoff", "sum_of_squares", "sup", "argmax", "support", "box_points"});
  for (auto N : parse_int_list(o.N)) {
    auto m = moment_count(system, N, o.l, cutoff, box);
    t.add({num(N), num(static_cast<std::uint64_t>(o.l)), o.cutoff, num(m.sum_of_squares), num(m.sup),
           join_ints(m.argmax), num(static_cast<std::uint64_t>(m.support)), num(m.box_points)});
  }
  emit(ctx, "moments.csv", t);
}

void run_schmidt(Context& ctx, const Opts& o) {
  if (o.l < 1) throw InputError("--l must be >= 1");
  auto system = load_system(o.system);
  const double d = static_cast<double>(system.arity());
  const double DQ = static_cast<double>(system.total_degree());
  const double D = DQ - d;  // 2 r_2 + ... + k r_k
  BoxCountOptions box{ctx.budget, ctx.settings.threads};
  Table t({"N", "l", "sup", "argmax", "box_points", "normalized_d_minus_D", "normalized_ld_minus_DQ"});
  for (auto N : parse_int_list(o.N)) {
    std::string sup, arg;
    double sup_value;
    std::uint64_t points;
    if (o.l == 1) {
      auto c = box_system_count(system, N, box);
      sup = num(c.sup);
      sup_value = static_cast<double>(c.sup);
      arg = join_ints(c.argmax);
      points = c.box_points;
    } else {
      auto m = moment_count(system, N, o.l, CutoffKind::indicator, box);
      sup = num(m.sup);
      sup_value = to_double(m.sup);
      arg = join_ints(m.argmax);
      points = m.box_points;
    }
    const double n = static_cast<double>(N);
    const double l = o.l;
    std::optional<double> a, b;
    if (N >= 1) {
      a = sup_value / std::pow(n, d - D);
      b = sup_value / std::pow(n, l * d - DQ);
    }
    t.add({num(N), num(static_cast<std::uint64_t>(o.l)), sup, arg, num(points), num(a), num(b)});
  }
  emit(ctx, "schmidt.csv", t);
}

void run_ratio(Context& ctx, const Opts& o) {
  require_input(o);
  const auto ps = parse_double_list(o.p.empty() ? "2,4,6,inf" : o.p);
  RatioPolicy policy;
  policy.uniform = !o.no_uniform;
  policy.random_draws = o.random_draws;
  policy.seed = ctx.seed;
  policy.error_tolerance = o.tolerance;
  policy.budget = ctx.budget;
  policy.threads = ctx.fft_threads();
  if (!policy.uniform && !policy.random_draws) throw InputError("no weights selected");
  RatioReport rep;
  if (!o.form.empty()) {
    auto form = load_form(o.form);
    auto lambdas = parse_int_list(o.lambda);
    auto [lo, hi] = std::minmax_element(lambdas.begin(), lambdas.end());
    if (static_cast<std::int64_t>(lambdas.size()) != *hi - *lo + 1)
      throw InputError("ratio-report takes a contiguous lambda range a..b");
    rep = ratio_report_hypersurface(form, certificate_for(form, o.m_low), *lo, *hi, ps, policy);
  } else {
    auto Ns = parse_int_list(o.N);
    auto [lo, hi] = std::minmax_element(Ns.begin(), Ns.end());
    if (static_cast<std::int64_t>(Ns.size()) != *hi - *lo + 1) throw InputError("ratio-report takes a contiguous N range a..b");
    rep = ratio_report_graph(load_system(o.system), *lo, *hi, ps, policy);
  }
  Table t({"scale", "p", "weights", "norm", "bound", "ratio", "running_max", "error_estimate", "flagged"});
  for (const auto& r : rep.rows)
    t.add({num(r.scale), exponent(r.p), r.weights, num(r.norm), num(r.bound), num(r.ratio), num(r.running_max),
           num(r.error_estimate), flag(r.flagged)});
  emit(ctx, "ratio-report.csv", t);
  Table tr({"p", "max_ratio", "slope"});
  for (const auto& r : rep.trends) tr.add({exponent(r.p), num(r.max_ratio), num(r.slope)});
  emit(ctx, "ratio-trends.csv", tr);
  ctx.summary["skipped"] = rep.skipped;
  if (rep.flagged) ctx.warn(std::to_string(rep.flagged) + " ratio rows have a grid error above tolerance");
}

// ---- registration ----

void form_option(CLI::App* sub, Opts& o, bool allow_system) {
  auto* f = sub->add_option("--form", o.form, "form file (JSON)")->check(CLI::ExistingFile);
  if (allow_system) {
    f->excludes(sub->add_option("--system", o.system, "graded system file (JSON)")->check(CLI::ExistingFile));
  } else {
    f->required();
  }
}

void m_low_option(CLI::App* sub, Opts& o) {
  sub->add_option("--m-low", o.m_low, "declared lower bound for Q on the unit sphere (positive rational)");
}

}  // namespace

void add_commands(CLI::App& app, Action& selected) {
  auto o = std::make_shared<Opts>();
  auto bind = [&selected, o](CLI::App* sub, void (*fn)(Context&, const Opts&)) {
    sub->callback([&selected, o, fn] { selected = [o, fn](Context& ctx) { fn(ctx, *o); }; });
  };

  auto* params = app.add_subcommand("params", "structural parameters of a form or system");
  form_option(params, *o, true);
  params->add_option("--singular-dim", o->singular_dim, "declared dim of the singular locus (general forms)");
  params->add_option("--rank", o->ranks, "declared Birch rank per degree, degree=value");
  params->add_option("--s", o->s_list, "copies s for the direct-sum checks (default 1..4)");
  bind(params, run_params);

  auto* enumerate = app.add_subcommand("enumerate", "integer points of {Q = lambda}");
  form_option(enumerate, *o, false);
  enumerate->add_option("--lambda", o->lambda, "level")->required();
  enumerate->add_flag("--rlab", o->rlab, "also write points.rlab");
  m_low_option(enumerate, *o);
  bind(enumerate, run_enumerate);

  auto* count = app.add_subcommand("count", "N_Q(lambda) over a range");
  form_option(count, *o, false);
  count->add_option("--lambda", o->lambda, "levels, e.g. 1..100")->required();
  m_low_option(count, *o);
  bind(count, run_count);

  auto* gauss = app.add_subcommand("gauss", "normalized Gauss sums G(a, q; m)");
  form_option(gauss, *o, false);
  gauss->add_option("--q", o->q, "modulus")->required();
  gauss->add_option("--a", o->a, "residues (default: all units mod q)");
  gauss->add_option("--m", o->m, "frequency m, comma separated (default 0)");
  bind(gauss, run_gauss);

  auto* weyl = app.add_subcommand("weyl-report", "decay of sup |G(a, q; m)| in q");
  form_option(weyl, *o, false);
  weyl->add_option("--q-max", o->q_max, "largest modulus")->required();
  weyl->add_flag("--odd-only", o->odd_only, "odd q only");
  weyl->add_option("--kappa", o->kappa, "override kappa (rational)");
  bind(weyl, run_weyl);

  auto* surface = app.add_subcommand("surface", "Fourier decay of the surface measure");
  form_option(surface, *o, false);
  surface->add_option("--nodes", o->nodes, "quadrature node budget");
  surface->add_option("--reference-nodes", o->reference_nodes, "second quadrature for error estimates");
  surface->add_option("--scheme", o->scheme, "product or halton");
  surface->add_option("--magnitudes", o->magnitudes, "|xi| values");
  surface->add_option("--directions", o->directions, "probe directions");
  surface->add_option("--kappa", o->kappa, "override kappa (rational)");
  surface->add_option("--neighborhood", o->ts, "also report t * (phi_t * dsigma) at these t");
  m_low_option(surface, *o);
  bind(surface, run_surface);

  auto* magyar = app.add_subcommand("magyar-error", "minor-arc error of the Magyar decomposition");
  form_option(magyar, *o, false);
  magyar->add_option("--lambda", o->lambda, "levels (default 20..200:20)");
  magyar->add_option("--nodes", o->nodes, "quadrature node budget");
  magyar->add_option("--reference-nodes", o->reference_nodes, "second quadrature for error estimates");
  magyar->add_option("--scheme", o->scheme, "product or halton");
  magyar->add_option("--gamma", o->gamma, "decay reference exponent (rational)");
  magyar->add_option("--truncation", o->truncation, "ceiling or floor");
  m_low_option(magyar, *o);
  bind(magyar, run_magyar);

  auto* kernel = app.add_subcommand("kernel-check", "two-path check of the multiplier kernels");
  form_option(kernel, *o, false);
  kernel->add_option("--lambda", o->lambda, "levels")->required();
  kernel->add_option("--q", o->q, "moduli (default 1,2,3)");
  kernel->add_option("--j", o->j, "pieces (default 0,1)");
  kernel->add_option("--j-max", o->j_max, "number of pieces minus one");
  kernel->add_option("--grid", o->grid, "torus samples per axis");
  kernel->add_option("--radius", o->radius, "comparison radius in units of lambda^{1/k}");
  kernel->add_option("--nodes", o->nodes, "quadrature node budget");
  kernel->add_option("--scheme", o->scheme, "product or halton");
  m_low_option(kernel, *o);
  bind(kernel, run_kernel);

  auto* ext = app.add_subcommand("extension-norm", "L^p norms of E_lambda a or E_N a on a torus grid");
  form_option(ext, *o, true);
  ext->add_option("--lambda", o->lambda, "level (with --form)");
  ext->add_option("--N", o->N, "box scale (with --system)");
  ext->add_option("--p", o->p, "exponents (default 2,4,inf)");
  ext->add_option("--weights", o->weights, "uniform, smooth or random");
  ext->add_option("--sizes", o->sizes, "grid axis sizes (default: exact for the largest even p)");
  ext->add_option("--order", o->order, "moment order the automatic grid is exact for");
  ext->add_flag("--dump", o->dump, "also write grid.rlab");
  m_low_option(ext, *o);
  bind(ext, run_extension);

  auto* moments = app.add_subcommand("moments", "exact even moments by counting");
  form_option(moments, *o, true);
  moments->add_option("--lambda", o->lambda, "levels (with --form)");
  moments->add_option("--N", o->N, "box scales (with --system)");
  moments->add_option("--l", o->l, "moment order l (integral of |E|^{2l})")->required();
  moments->add_option("--cutoff", o->cutoff, "indicator or smooth");
  m_low_option(moments, *o);
  bind(moments, run_moments);

  auto* schmidt = app.add_subcommand("schmidt", "sup over t of box solution counts");
  schmidt->add_option("--system", o->system, "graded system file (JSON)")->required()->check(CLI::ExistingFile);
  schmidt->add_option("--N", o->N, "box scales")->required();
  schmidt->add_option("--l", o->l, "copies l (default 1)");
  bind(schmidt, run_schmidt);

  auto* ratio = app.add_subcommand("ratio-report", "norm ratios against the conjectured bounds");
  form_option(ratio, *o, true);
  ratio->add_option("--lambda", o->lambda, "level range a..b (with --form)");
  ratio->add_option("--N", o->N, "scale range a..b (with --system)");
  ratio->add_option("--p", o->p, "exponents (default 2,4,6,inf)");
  ratio->add_option("--random-draws", o->random_draws, "random phase weights per scale");
  ratio->add_flag("--no-uniform", o->no_uniform, "skip a = 1");
  ratio->add_option("--tolerance", o->tolerance, "flag when the grid error exceeds this fraction of the norm");
  m_low_option(ratio, *o);
  bind(ratio, run_ratio);
}

}  // namespace rlcli
