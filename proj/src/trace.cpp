#include "tracelab/trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tracelab::trace {

using energy::MeshFunction;
using geom::FirstOrderGeometry;
using report::Mag;

namespace {

constexpr double kLogSwitch = 700.0;  // largest exponent summed in linear scale

void check_args(double alpha, int n) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("trace_integral: alpha must be >= 0");
  if (n < 2) throw std::invalid_argument("trace_integral: dimension must be >= 2");
}

// log10 of a sum given the natural-log values of its (positive) terms
double log_sum_exp10(const std::vector<double>& ln_terms) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double t : ln_terms) peak = std::max(peak, t);
  if (!std::isfinite(peak)) return -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (double t : ln_terms) acc += std::exp(t - peak);
  return (peak + std::log(acc)) / std::numbers::ln10;
}

double edge_length(const geom::TriMesh& mesh, const geom::BoundaryEdge& e) {
  const auto& va = mesh.vertices[e.a];
  const auto& vb = mesh.vertices[e.b];
  return std::hypot(vb[0] - va[0], vb[1] - va[1]);
}

}  // namespace

TraceEvalResult trace_integral_detailed(const FirstOrderGeometry& g, const MeshFunction& u,
                                        double alpha, int n, const std::string& tag) {
  check_args(alpha, n);
  if (u.size() != g.n_vertices())
    throw std::invalid_argument("trace_integral: function size does not match the mesh");
  const double q = static_cast<double>(n) / (n - 1);
  const auto& mesh = *g.mesh;

  TraceEvalResult res;
  res.alpha = alpha;
  res.exponent_max = -std::numeric_limits<double>::infinity();

  // exponent per referenced boundary node, tracking the peak
  bool any_edge = false;
  std::vector<double> ln_terms;  // ln( len/2 ) + exponent, two per edge
  ln_terms.reserve(2 * mesh.boundary_edges.size());
  double direct = 0.0;
  for (const auto& e : mesh.boundary_edges) {
    if (!tag.empty() && e.tag != tag) continue;
    any_edge = true;
    double len = edge_length(mesh, e);
    for (int node : {e.a, e.b}) {
      double v = u[static_cast<std::size_t>(node)];
      if (!std::isfinite(v))
        throw std::runtime_error("trace_integral: non-finite value at boundary node " +
                                 std::to_string(node));
      double expo = alpha * std::pow(std::abs(v), q);
      if (expo > res.exponent_max) {
        res.exponent_max = expo;
        res.peak_node = node;
      }
      ln_terms.push_back(std::log(0.5 * len) + expo);
      // capped so the linear pass never traps; discarded if we switch to logs
      direct += 0.5 * len * std::exp(std::min(expo, kLogSwitch));
    }
  }
  if (!any_edge)
    throw std::invalid_argument("trace_integral: no boundary edges carry tag '" + tag + "'");

  if (res.exponent_max <= kLogSwitch) {
    res.boundary = Mag::from_value(direct);
  } else {
    res.boundary = Mag::from_log10(log_sum_exp10(ln_terms));
  }
  return res;
}

double trace_integral(const FirstOrderGeometry& g, const MeshFunction& u, double alpha, int n,
                      const std::string& tag) {
  return trace_integral_detailed(g, u, alpha, n, tag).boundary.value;
}

TraceEvalResult conversion_identity_check(const FirstOrderGeometry& g, const MeshFunction& u,
                                          const MeshFunction& w, double alpha, int n,
                                          const energy::EnergyConfig& cfg) {
  check_args(alpha, n);
  energy::validate(cfg);
  if (u.size() != g.n_vertices() || w.size() != g.n_vertices())
    throw std::invalid_argument("conversion_identity_check: function size mismatch");

  TraceEvalResult res = trace_integral_detailed(g, u, alpha, n, {});

  const double q = static_cast<double>(n) / (n - 1);
  const double ratio = g.total_boundary / g.total_area;
  const double d2 = cfg.delta * cfg.delta;
  const auto& mesh = *g.mesh;

  // Interior side, cellwise: the flux field |grad w|^{p-2} grad w and grad u
  // are cell constants; the exponential factors are integrated by the
  // midpoint-of-edges rule (exact for quadratics, enough for O(h) overall).
  double interior = 0.0;
  for (std::size_t c = 0; c < g.n_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    auto [ux, uy] = g.cell_gradient(u, c);
    auto [wx, wy] = g.cell_gradient(w, c);
    double wn2 = wx * wx + wy * wy;
    double coef = 1.0;
    if (cfg.p > 2.0)
      coef = std::pow(wn2, 0.5 * cfg.p - 1.0);
    else if (cfg.p < 2.0)
      coef = std::pow(wn2 < d2 ? wn2 + d2 : wn2, 0.5 * cfg.p - 1.0);
    double advect = ux * (coef * wx) + uy * (coef * wy);

    double term_grad = 0.0;  // mean over edge midpoints of e^{...} * alpha*q*|u|^{q-1}*sgn
    double term_source = 0.0;  // mean over edge midpoints of e^{...}
    for (int k = 0; k < 3; ++k) {
      double um = 0.5 * (u[cell[k]] + u[cell[(k + 1) % 3]]);
      double au = std::abs(um);
      double ex = std::exp(alpha * std::pow(au, q));
      double sgn = (um > 0) - (um < 0);
      term_grad += ex * alpha * q * std::pow(au, q - 1.0) * sgn / 3.0;
      term_source += ex / 3.0;
    }
    interior += g.area[c] * (term_grad * advect + term_source * ratio);
  }
  res.interior = interior;
  res.defect = std::isfinite(res.boundary.value)
                   ? std::abs(res.boundary.value - interior) / res.boundary.value
                   : std::numeric_limits<double>::infinity();
  return res;
}

std::string scan_verdict(const std::vector<Mag>& values, double baseline) {
  if (!(baseline > 0.0)) throw std::invalid_argument("scan_verdict: baseline must be positive");
  const std::size_t n = values.size();
  if (n == 0) return "inconclusive";

  bool increasing = n >= 2;
  double peak = values[0].exponent10;
  for (std::size_t i = 1; i < n; ++i) {
    if (!(values[i].exponent10 > values[i - 1].exponent10)) increasing = false;
    peak = std::max(peak, values[i].exponent10);
  }
  if (increasing && peak >= std::log10(1000.0 * baseline)) return "blow-up";

  // stabilized running max: compare the last quarter against the mid run
  const std::size_t quarter = std::max<std::size_t>(1, n / 4);
  double last_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = n - quarter; i < n; ++i)
    last_max = std::max(last_max, values[i].exponent10);
  double mid_max = -std::numeric_limits<double>::infinity();
  std::size_t mid_begin = quarter, mid_end = n - quarter;
  if (mid_begin >= mid_end) mid_begin = 0;  // short scan: everything before the tail
  for (std::size_t i = mid_begin; i < mid_end; ++i)
    mid_max = std::max(mid_max, values[i].exponent10);
  if (mid_begin < mid_end && last_max <= std::log10(1.05) + mid_max) return "bounded";
  return "inconclusive";
}

report::ScanReport boundedness_scan(const FirstOrderGeometry& g, const std::vector<double>& params,
                                    const std::vector<MeshFunction>& family, double alpha, int n,
                                    const ScanOptions& opts) {
  check_args(alpha, n);
  if (params.size() != family.size())
    throw std::invalid_argument("boundedness_scan: params and family differ in length");
  if (family.empty()) throw std::invalid_argument("boundedness_scan: empty family");
  const bool with_holder = opts.holder_p > 0.0;
  double p_star = 0.0;
  if (with_holder) {
    if (!(opts.holder_p > 1.0) || !(opts.holder_p < n))
      throw std::invalid_argument("boundedness_scan: holder_p must lie in (1, n)");
    p_star = 1.0 / (1.0 / opts.holder_p - 1.0 / n);
  }
  const double q = static_cast<double>(n) / (n - 1);

  report::ScanReport rep;
  if (with_holder) rep.extra_names.push_back("holder_diag");

  std::vector<Mag> values;
  for (std::size_t k = 0; k < family.size(); ++k) {
    report::ScanRow row;
    row.param = params[k];
    row.grad_norm = energy::dirichlet_norm(g, family[k], static_cast<double>(n));
    row.mean = energy::area_mean(g, family[k]);

    MeshFunction hat = energy::mean_zero_project(g, family[k]);
    // a P1 interpolant of a constant carries a round-off gradient, not a
    // zero one; rescaling by it would amplify noise into a fake profile
    double sup = 0.0;
    for (double v : family[k]) sup = std::max(sup, std::abs(v));
    if (row.grad_norm > 1e-12 * (1.0 + sup))
      for (auto& v : hat) v /= row.grad_norm;

    TraceEvalResult eval = trace_integral_detailed(g, hat, alpha, n, opts.tag);
    row.value = eval.boundary;
    row.exponent_max = eval.exponent_max;

    if (with_holder) {
      // ( int e^{p* alpha |u|^q} |u|^{p*/(n-1)} )^{1/p*} by the same trapezoid
      // rule, in log space throughout (zero nodal values contribute nothing)
      std::vector<double> ln_terms;
      for (const auto& e : g.mesh->boundary_edges) {
        if (!opts.tag.empty() && e.tag != opts.tag) continue;
        double len = edge_length(*g.mesh, e);
        for (int node : {e.a, e.b}) {
          double au = std::abs(hat[static_cast<std::size_t>(node)]);
          if (au == 0.0) continue;
          ln_terms.push_back(std::log(0.5 * len) + p_star * alpha * std::pow(au, q) +
                             (p_star / (n - 1)) * std::log(au));
        }
      }
      row.extras.push_back(Mag::from_log10(log_sum_exp10(ln_terms) / p_star));
    }

    values.push_back(row.value);
    rep.rows.push_back(std::move(row));
  }

  rep.verdict = scan_verdict(values, geom::boundary_measure(*g.mesh, opts.tag));
  return rep;
}

}  // namespace tracelab::trace
